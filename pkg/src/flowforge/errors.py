"""Exception types shared across the package."""


class FlowforgeError(Exception):
    """Base class for all errors raised by this package."""


class CaptureFormatError(FlowforgeError):
    """Capture file is not a recognised PCAP/PCAPNG format, or uses an
    unsupported link layer."""


class GroundTruthError(FlowforgeError):
    """Ground-truth rule file is malformed."""


class DatasetError(FlowforgeError):
    """Flow CSV reading/writing failed validation."""


class ConfigError(FlowforgeError):
    """Pipeline configuration is invalid."""
