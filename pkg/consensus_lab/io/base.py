from io import StringIO
from shutil import copyfileobj


class _Reader(object):
    """Base class for reading consensus_lab files

    Subclasses implement ``read``.
    """

    _newline_char = "\n"
    _comment_char = "#"

    def __init__(self, filepath):
        self.filepath = filepath

    def read(self):
        raise NotImplementedError()

    def _open_file(self):
        # text files are utf-8 and always use "\n"
        return open(self.filepath, "r", encoding="utf-8", newline=self._newline_char)

    def _content_lines(self):
        """
        Yield ``(lineno, fields)`` for every non-blank, non-comment line

        ``lineno`` is 1-based.
        """
        with self._open_file() as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith(self._comment_char):
                    continue
                yield lineno, stripped.split()


class _Writer(object):
    """Base class for writing consensus_lab files

    Subclasses implement ``_write_content``, which writes into an in-memory buffer.
    The buffer is only copied to disk once it is complete, so a failing writer
    never leaves a half-written file behind.
    """

    _newline_char = "\n"

    def write(self, obj, filepath):
        """
        Write ``obj`` to ``filepath``

        Parameters
        ----------
        obj : object
            Object to write

        filepath : str
            Filepath of the file to write to.
        """
        self._filepath = filepath
        output = StringIO()
        self._write_content(obj, output)

        with open(
            filepath, "w", encoding="utf-8", newline=self._newline_char
        ) as output_file:
            output.seek(0)
            copyfileobj(output, output_file)

    def _write_content(self, obj, output):
        raise NotImplementedError()
