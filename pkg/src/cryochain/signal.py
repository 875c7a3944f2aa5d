"""Uniformly sampled waveforms, the common currency between chain blocks."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SampledSignal:
    """Real or complex samples on a uniform time grid.

    Samples are copied into a read-only array on construction so that a
    signal can be shared between blocks without defensive copies.
    """

    samples: np.ndarray
    sample_rate: float
    start_time: float = 0.0
    clipped_fraction: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")
        arr = np.array(self.samples)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.iscomplexobj(arr):
            arr = arr.astype(float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples contain NaN or Inf")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self):
        return self.samples.size

    @property
    def dt(self):
        return 1.0 / self.sample_rate

    @property
    def times(self):
        return self.start_time + np.arange(self.samples.size) / self.sample_rate

    @property
    def duration(self):
        return self.samples.size / self.sample_rate

    @property
    def is_complex(self):
        return np.iscomplexobj(self.samples)

    def power(self):
        """Mean of |x|^2."""
        return float(np.mean(np.abs(self.samples) ** 2))

    def rms(self):
        return float(np.sqrt(self.power()))

    def with_samples(self, samples, **kwargs):
        return SampledSignal(samples, self.sample_rate, self.start_time, **kwargs)
