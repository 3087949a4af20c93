"""Matrix models attached to maps on surfaces: exact combinatorics, duality and Monte Carlo checks."""

from __future__ import annotations

__version__ = "0.1.0"
