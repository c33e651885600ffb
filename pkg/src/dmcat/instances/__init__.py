"""Instance generators, the text file format and the witness search."""
from .bundle import InstanceBundle
from .fileformat import emit_fincat, load_bundle, parse_fincat, save_bundle, structurally_equal

__all__ = ["InstanceBundle", "emit_fincat", "load_bundle", "parse_fincat",
           "save_bundle", "structurally_equal"]
