"""Exception types shared across the package."""


class ZBusError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(ZBusError):
    """Invalid network, load, or feeder-file data."""


class SingularMatrixError(ZBusError):
    """Matrix is singular to working precision."""


class IllPosedNetworkError(ZBusError):
    """The load-augmented bus admittance matrix cannot be inverted."""


class SingularLoadVoltageError(ZBusError):
    """A voltage-dependent load saw a (near-)zero driving voltage."""

    def __init__(self, node_id, where, message=None):
        self.node_id = node_id
        self.where = where
        super().__init__(
            message
            or f"zero driving voltage for the load at node {node_id!r} ({where})"
        )


class CertificateUndefinedError(ZBusError):
    """Certificate quantities would divide by a vanishing no-load voltage."""
