"""Exception hierarchy shared by all docvault modules."""


class DocVaultError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(DocVaultError):
    """A caller-supplied value violates a precondition."""


class InvalidZone(InvalidInput):
    """A zone rectangle is out of bounds, overlapping or empty."""


class InvalidTemplate(InvalidInput):
    """A template definition references out-of-bounds field rectangles."""


class IntegrityFailure(DocVaultError):
    """Restored bytes do not hash to the recorded digest."""

    def __init__(self, zone_id: int, message: str | None = None):
        self.zone_id = zone_id
        super().__init__(message or f"integrity check failed for zone {zone_id}")


class NotFound(DocVaultError):
    """A referenced record does not exist."""


class AlreadyRevoked(DocVaultError):
    """The fact already has a revocation entry."""


class ApprovalRequired(DocVaultError):
    """Issuance attempted without a notary approval."""


class RetryableError(DocVaultError):
    """Transient failure; the caller may retry."""


class Unauthorized(DocVaultError):
    """The presented token does not authorize the operation."""


class RevokedPath(DocVaultError):
    """All versions of this keystore path have been disabled."""


class CorruptionError(DocVaultError):
    """Stored bytes no longer hash to their content id."""


class RemoteIntegrityError(DocVaultError):
    """The pinning service reported a different hash than the local id."""


class StateViolation(DocVaultError):
    """Operation attempted in a document state that does not allow it."""


class UndefinedMetric(DocVaultError):
    """The metric is undefined for this input (e.g. zero-mean reference)."""


class IoError(DocVaultError):
    """Underlying storage failed."""
