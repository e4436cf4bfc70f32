"""Forecasting, gap reconstruction and anomaly detection models."""

from .base import (METRICS, Forecaster, Model, ModelBasedAnomalyDetector,
                   Reconstructor, load_model)
from .periodic import (PeriodicAverageAnomalyDetector, PeriodicAverageForecaster,
                       PeriodicAverageReconstructor, detect_periodicity)

__all__ = ['METRICS', 'Forecaster', 'Model', 'ModelBasedAnomalyDetector',
           'PeriodicAverageAnomalyDetector', 'PeriodicAverageForecaster',
           'PeriodicAverageReconstructor', 'Reconstructor',
           'detect_periodicity', 'load_model']
