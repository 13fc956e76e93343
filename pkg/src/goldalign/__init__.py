"""Gold-standard word-alignment toolkit.

Builds and evaluates reference word-alignment annotations over verse-aligned
bitexts: deterministic frequency-stratified sampling of focus words, a
forced-choice annotation model and service with durable persistence, weighted
inter-annotator agreement statistics, and gold translation-lexicon extraction
and scoring.
"""

__version__ = "0.1.0"
