"""Rainbow Hamilton cycles and colour couplings in random (hyper)graphs."""

__version__ = "0.1.0"

from .core import (ColoredHypergraph, ModelError, ModelParams, all_edges, colex_rank,  # noqa: E402
                   coupled_q, generate, ham_ell_edge_count, hc_family_richness,
                   rainbow_complete, threshold_p)
from .verify import RainbowCertificate, check_certificate, make_certificate  # noqa: E402

__all__ = [
    "__version__", "ColoredHypergraph", "ModelError", "ModelParams", "RainbowCertificate",
    "all_edges", "check_certificate", "colex_rank", "coupled_q", "generate",
    "ham_ell_edge_count", "hc_family_richness", "make_certificate", "rainbow_complete",
    "threshold_p",
]
