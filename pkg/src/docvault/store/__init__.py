"""Content-addressed blobs, remote pinning, encrypted keystore, metadata SQL."""

from .cas import ContentStore, content_id, is_content_id
from .keystore import (
    KeyStore,
    SCOPE_ADMIN,
    SCOPE_READ,
    SCOPE_WRITE,
    Token,
    master_key_from_env,
)
from .metadata import MetadataStore
from .pinning import (
    HttpxTransport,
    LoopbackTransport,
    PinReceipt,
    PinningClient,
    Transport,
)

__all__ = [
    "ContentStore",
    "HttpxTransport",
    "KeyStore",
    "LoopbackTransport",
    "MetadataStore",
    "PinReceipt",
    "PinningClient",
    "SCOPE_ADMIN",
    "SCOPE_READ",
    "SCOPE_WRITE",
    "Token",
    "Transport",
    "content_id",
    "is_content_id",
    "master_key_from_env",
]
