"""Zero-shot recognition by generating pseudo feature representations.

Pipeline: train a joint attribute feature extractor on seen classes, harvest
confidence-filtered attribute sub-vectors into a cognitive repository,
synthesize pseudo representations for unseen classes by probability-guided
sampling, train a softmax class predictor on them, and chain extractor +
predictor for inference.
"""

__version__ = "0.1.0"
