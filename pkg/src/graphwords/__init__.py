"""Graph Words: a graph<->sequence codec with a transformer autoencoder for molecules."""

__version__ = "0.1.0"
