"""Three-mode quantum model of probe/sideband beating on a prepared Raman coherence."""

__version__ = "0.1.0"
