"""docvault: privacy-preserving document processing at desk scale.

Subpackages:

- ``obfuscate``   reversible zone obfuscation with per-zone sharable keys
- ``extract``     template registration, alignment, matching and OCR fields
- ``facts``       signed, minimal, expirable assertions with revocation
- ``anchor``      notary workflow and a hash-chained tamper-evident ledger
- ``store``       content-addressed blobs, encrypted keystore, metadata SQL
- ``orchestrate`` document lifecycle, share links, REST API and CLI
"""

__version__ = "0.1.0"
