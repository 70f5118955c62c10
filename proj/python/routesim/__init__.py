"""Deterministic packet-level routing simulator.

Thin Python wrapper around the compiled ``_core`` extension.  When the
package is installed the extension lives alongside this file; during
development the ``ROUTESIM_EXT_DIR`` environment variable may point at the
build directory that contains the freshly built module.
"""

import importlib
import os
import sys


def _load_core():
    ext_dir = os.environ.get("ROUTESIM_EXT_DIR")
    if ext_dir:
        sys.path.insert(0, ext_dir)
        try:
            return importlib.import_module("_core")
        finally:
            sys.path.remove(ext_dir)
    return importlib.import_module("._core", __name__)


_core = _load_core()

__all__ = []
for _name in dir(_core):
    if not _name.startswith("_"):
        globals()[_name] = getattr(_core, _name)
        __all__.append(_name)

__version__ = "1.0.0"
