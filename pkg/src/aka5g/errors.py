"""Exception types shared across the package."""


class Aka5gError(Exception):
    """Base class for all package-specific failures."""


class SuiteKeyError(Aka5gError):
    """Algorithm suite does not support the supplied key length."""


class SchemeNotFoundError(Aka5gError):
    """SUCI protection scheme id is not registered."""


class ConcealmentError(Aka5gError):
    """SUCI could not be produced (bad key or oversized identity)."""


class DecryptionError(Aka5gError):
    """SUCI ciphertext failed authentication or could not be decrypted."""


class StateError(Aka5gError):
    """Operation not permitted in the current entity state."""


class ChannelExpiredError(StateError):
    """Session channel counter exhausted; re-authentication required."""


class IntegrityError(Aka5gError):
    """Protected PDU failed its MAC check."""


class ReplayError(Aka5gError):
    """Protected PDU carried a stale counter value."""


class ConfigError(Aka5gError):
    """Scenario configuration is invalid.

    ``location`` is a dotted path into the offending config field.
    """

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class MissingEvidenceError(Aka5gError):
    """An attack precondition is not met by the supplied intercept/trace."""
