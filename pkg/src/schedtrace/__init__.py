"""schedtrace: cluster trace analysis, task failure prediction, and
predictive-rescheduling simulation."""

__version__ = "0.1.0"
