"""Compressed coding-vector headers for random linear network coding.

A coding vector with at most ``m`` nonzero entries is replaced in the packet
header by its Reed-Solomon syndrome.  Three ways to get it back:

* ERROR: blind syndrome decoding, needs ``n - k >= 2m``.
* ERASURE: an n-bit ID segment marks the support, needs ``n - k >= m``.
* LIST: Guruswami-Sudan list decoding plus one extension-field symbol of
  side information that singles out the true vector.
"""

from .errors import (
    AmbiguousSelection,
    DecodeFailure,
    InconsistentIdSegment,
    InconsistentSystem,
    InfeasibleConfig,
    ListOverflow,
    NcvcError,
    NoMatch,
)
from .gf import GF, ExtField, get_field
from .header import (
    Packet,
    PacketHeader,
    Scheme,
    SchemeConfig,
    combine_headers,
    decode_header,
    encode_source_header,
    make_config,
    overhead,
    overhead_bytes,
    overhead_for,
    parse,
    serialize,
)
from .listdec import ListDecodeParams, brute_force_list, gs_radius, list_error_patterns
from .rs import CodeSpec, bma_error_decode, build_code, erasure_decode, syndrome
from .sideinfo import SideInfoParams, derive_point, evaluate_side_info, select_candidate

__version__ = "0.1.0"
