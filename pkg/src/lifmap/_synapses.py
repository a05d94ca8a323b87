import numpy as np


class SynapseTable:
    """Synapses grouped by presynaptic neuron for fast fan-out of spikes."""

    def __init__(self, n_neurons, pre, post, weight, delay_steps):
        order = np.argsort(pre, kind="stable")
        self.post = np.asarray(post)[order]
        self.weight = np.asarray(weight)[order]
        self.delay = np.asarray(delay_steps, dtype=np.int64)[order]
        counts = np.bincount(np.asarray(pre, dtype=np.int64), minlength=n_neurons)
        self.indptr = np.concatenate(([0], np.cumsum(counts)))
        self.max_delay = int(self.delay.max()) if self.delay.size else 1

    def outgoing(self, fired):
        """Indices into post/weight/delay for all synapses leaving ``fired``."""
        starts = self.indptr[fired]
        lengths = self.indptr[fired + 1] - starts
        total = int(lengths.sum())
        if total == 0:
            return np.zeros(0, dtype=np.int64)
        offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
        return offsets + np.arange(total)


class DelayBuffer:
    """Ring buffer of pending synaptic input, one row per future step."""

    def __init__(self, n_neurons, max_delay, dtype):
        self.size = max_delay + 1
        self.buf = np.zeros((self.size, n_neurons), dtype=dtype)

    def pop(self, step):
        row = self.buf[step % self.size]
        out = row.copy()
        row[:] = 0
        return out

    def push(self, step, delays, targets, values):
        np.add.at(self.buf, ((step + delays) % self.size, targets), values)
