"""camoseg: segment-then-classify for camouflaged scenes with open vocabularies."""

__version__ = "0.1.0"

PAPER_EMBED_DIM = 768
PAPER_COND_DIM = 256
PAPER_FEATURE_SHAPE = (64, 64, 256)
