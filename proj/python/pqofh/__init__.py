"""Python surface of the hybrid post-quantum fronthaul protection core.

Everything heavy lives in the compiled extension; this package just
re-exports it and picks a default mock-KEM profile location.
"""

import os

from _pqofh import (
    CSV_HEADER,
    ESP_OVERHEAD,
    Error,
    Registry,
    SecurityAssociation,
    handshake,
    read_results_csv,
    run_session,
)

__all__ = [
    "CSV_HEADER",
    "ESP_OVERHEAD",
    "Error",
    "Registry",
    "SecurityAssociation",
    "default_registry",
    "handshake",
    "read_results_csv",
    "run_session",
]


def default_registry() -> Registry:
    """Registry built from $PQOFH_CONFIG_DIR/mock_kems.conf (or ./configs)."""
    config_dir = os.environ.get("PQOFH_CONFIG_DIR", "configs")
    return Registry(os.path.join(config_dir, "mock_kems.conf"))
