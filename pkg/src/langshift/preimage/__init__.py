from .search import (
    DEFAULT_BUDGET,
    MotifScan,
    PreimageQuery,
    PreimageResult,
    brute_force_preimages,
    cell_order,
    decode_codes,
    encode_block,
    find_preimage,
    has_preimage,
    motif_containment,
    motif_free_preimage,
    preimages,
    scan_preimages,
)

__all__ = [
    "DEFAULT_BUDGET",
    "MotifScan",
    "PreimageQuery",
    "PreimageResult",
    "brute_force_preimages",
    "cell_order",
    "decode_codes",
    "encode_block",
    "find_preimage",
    "has_preimage",
    "motif_containment",
    "motif_free_preimage",
    "preimages",
    "scan_preimages",
]
