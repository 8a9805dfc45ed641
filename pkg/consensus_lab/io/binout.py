"""
Binary trace dumps (``*.ctrace``)

Layout, all little-endian:

- 8 byte magic ``b"CLTRACE1"``
- ``uint32`` order ``n``, ``uint32`` agent count, ``uint64`` sample count
- ``float64`` sample times
- ``float64`` states in row-major ``(samples, agents, n)`` order
"""
from dataclasses import dataclass
from io import BytesIO

import numpy as np

from ..errors import TraceFileError

MAGIC = b"CLTRACE1"
HEADER_DTYPE = np.dtype([("n", "<u4"), ("agents", "<u4"), ("samples", "<u8")])


@dataclass(frozen=True, eq=False)
class TraceData:
    """
    Contents of a binary trace dump

    ``states`` has shape ``(samples, n, agents)``, the layout of
    :attr:`consensus_lab.sim.SimTrace.states`.
    """

    times: np.ndarray
    states: np.ndarray

    @property
    def n(self):
        return self.states.shape[1]

    @property
    def agents(self):
        return self.states.shape[2]


class _BinData(object):
    def __init__(self, filepath):
        with open(filepath, "rb") as fh:
            self.data = memoryview(fh.read())
        self.filepath = filepath
        self.pos = 0

    def read_chunk(self, dtype, count=1):
        """
        Read the next ``count`` values of ``dtype``

        Raises
        ------
        TraceFileError
            The file ends before ``count`` values could be read
        """
        dtype = np.dtype(dtype)
        size = dtype.itemsize * count
        if self.pos + size > len(self.data):
            raise TraceFileError(
                "Truncated trace: expected {} more bytes at offset {}".format(
                    size, self.pos
                ),
                self.filepath,
            )
        res = np.frombuffer(self.data[self.pos : self.pos + size], dtype=dtype)
        self.pos += size

        return res

    @property
    def exhausted(self):
        return self.pos == len(self.data)


class _TraceBinaryReader(object):
    def __init__(self, filepath):
        self.filepath = filepath

    def read(self):
        stream = _BinData(self.filepath)
        magic = stream.read_chunk("S8")[0]
        if magic != MAGIC:
            raise TraceFileError(
                "Not a trace dump, magic is {!r}".format(magic), self.filepath
            )

        header = stream.read_chunk(HEADER_DTYPE)[0]
        n, agents, samples = (int(header[k]) for k in ("n", "agents", "samples"))
        times = stream.read_chunk("<f8", samples).astype(float)
        states = stream.read_chunk("<f8", samples * agents * n).astype(float)
        if not stream.exhausted:
            raise TraceFileError("Trailing bytes after the trace", self.filepath)

        return TraceData(
            times=times,
            states=states.reshape(samples, agents, n).transpose(0, 2, 1).copy(),
        )


class _TraceBinaryWriter(object):
    def write(self, trace, filepath):
        """
        Write the stored samples of ``trace``

        Parameters
        ----------
        trace : :obj:`consensus_lab.sim.SimTrace` or :obj:`TraceData`
            Trace to dump

        filepath : str
            Filepath of the file to write to.
        """
        samples, n, agents = trace.states.shape
        header = np.array([(n, agents, samples)], dtype=HEADER_DTYPE)

        output = BytesIO()
        output.write(MAGIC)
        output.write(header.tobytes())
        output.write(np.asarray(trace.times, dtype="<f8").tobytes())
        output.write(
            np.ascontiguousarray(trace.states.transpose(0, 2, 1), dtype="<f8").tobytes()
        )

        with open(filepath, "wb") as fh:
            fh.write(output.getvalue())
