"""scalebench: measure how the choice of feature-scaling technique changes
classification performance across models and imbalance levels."""

__version__ = "0.1.0"
