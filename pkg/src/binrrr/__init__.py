"""Low-rank multi-response binary classification with hinge-loss Gibbs posteriors."""

__version__ = "0.1.0"
