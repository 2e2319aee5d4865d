"""Tau-synchronizing sets of packed texts.

Library layout:

* :mod:`tausync.bitstream` -- LSB-first bit streams and the container format
* :mod:`tausync.text` -- packed texts, table-index codes, substring counter
* :mod:`tausync.recompress` -- restricted recompression boundary chains
* :mod:`tausync.runs` -- periods, run extensions, filtered run families
* :mod:`tausync.syncset` -- synchronizing sets, explicit and bitmask forms
* :mod:`tausync.sparsecodec` -- Elias-gamma and sparse sequence encodings
* :mod:`tausync.transducer` -- accelerated transducers over encodings
* :mod:`tausync.ranksupport` -- rank/select/predecessor support structures
* :mod:`tausync.fastpath` -- sparse-output query pipeline
* :mod:`tausync.oracle` -- brute-force references backing the test suite
"""

from .bitstream import BitStream, W
from .errors import DecodeError, InvalidArgument, InvalidInput
from .text import PackedText, SubstringCounter, build_substring_counter, remap_alphabet
from .sparsecodec import (SparseEncoding, gamma_decode, gamma_encode,
                          senc_decode, senc_encode, senc_from_list,
                          senc_size, senc_to_list)
from .recompress import RecompressionIndex, bk_bitmask, bk_explicit, max_dicut
from .runs import Run, enumerate_runs, period, run_extend, runs_bitmask, runs_tau
from .syncset import (SyncIndex, build_sync_bitmask, build_sync_explicit,
                      k_of_tau)
from .transducer import (TransducerSpec, run_multi, run_naive, run_sparse,
                         zip_multi, zip_pair)
from .ranksupport import (RankSupport, SelectSupport, VebIndex, build_rank,
                          build_select, build_veb, decompose)
from .fastpath import FastSyncIndex, preprocess_fast, shift_truncate

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
