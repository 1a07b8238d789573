"""Average sum rate and energy efficiency of NOMA VLC, RF and hybrid VLC-RF downlinks
under imperfect channel knowledge, with analytic evaluators and a Monte Carlo oracle."""

from .channel import CsiErrorModel, RfApConfig, VlcApConfig, lambertian_order, vlc_los_gain
from .errors import AccuracyError, ConfigError, DomainError, E1DomainError
from .hybrid import HybridConfig, energy_efficiency, hybrid_sum_rate, vlc_only_energy_efficiency
from .montecarlo import McConfig, mc_noma_rf_sum_rate, mc_noma_vlc_sum_rate, mc_ofdma_vlc_sum_rate
from .orderstats import GainSqDistribution, gain_sq_cdf, gain_sq_pdf, ordered_gain_sq_pdf
from .rates import (
    NomaAllocation,
    OfdmaAllocation,
    RateEstimate,
    analytic_noma_rf_sum_rate,
    analytic_noma_vlc_sum_rate,
    analytic_ofdma_vlc_sum_rate,
)

__version__ = "0.1.0"
