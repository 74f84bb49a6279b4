"""SARIMA and k-nearest-neighbour forecasting of annual energy-share series."""

from renewcast.series import SplitSpec, TimeSeries, chronological_split

__version__ = "0.1.0"

__all__ = ["SplitSpec", "TimeSeries", "chronological_split", "__version__"]
