import json
import logging
import os

import numpy as np

from dataclasses import dataclass
from typing import List, Optional, Tuple

from ..classical import WordDistribution, distribution_from_arrays
from ..errors import ValidationError
from ..measurement import DQMP
from ..settings import SAMPLE_CHUNK
from ..source import HMCQS
from ..utils import create_folder, format_word

logger = logging.getLogger(__name__)


@dataclass
class SampleRecord:
    """
    Independent measured realizations of a source.

    ``runs`` holds outcome indices into ``outcomes``, one row per run.
    ``states`` optionally holds the hidden source-state path of each run
    (length + 1 entries) and is never persisted.
    """
    seed: int
    protocol: str
    source: str
    outcomes: Tuple[str, ...]
    runs: np.ndarray
    states: Optional[np.ndarray] = None

    @property
    def count(self) -> int:
        return self.runs.shape[0]

    @property
    def length(self) -> int:
        return self.runs.shape[1]

    def words(self) -> List[Tuple[str, ...]]:
        return [tuple(self.outcomes[k] for k in row) for row in self.runs]

    def header(self) -> dict:
        return {
            "seed": self.seed,
            "protocol": self.protocol,
            "source": self.source,
            "outcomes": list(self.outcomes),
            "count": self.count,
            "length": self.length,
        }

    def save(self, file_path: str) -> str:
        """
        Write a JSON header line followed by one outcome string per run.

        :param file_path: str, destination
        :return: str, the path written
        """
        create_folder(os.path.dirname(file_path))
        with open(file_path, "w", encoding="utf-8") as f:
            f.write(json.dumps(self.header(), sort_keys=True) + "\n")
            for word in self.words():
                f.write(format_word(word) + "\n")
        logger.debug("Saved %d runs to %s", self.count, file_path)
        return file_path

    @classmethod
    def load(cls, file_path: str) -> "SampleRecord":
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                header = json.loads(f.readline())
                lines = [line.rstrip("\n") for line in f]
        except FileNotFoundError:
            raise ValidationError(f"File {file_path} does not exist")
        except json.JSONDecodeError as e:
            raise ValidationError(f"{file_path}:1:{e.colno}: invalid record header ({e.msg})")
        outcomes = tuple(header["outcomes"])
        index = {label: k for k, label in enumerate(outcomes)}
        separator = "" if all(len(label) == 1 for label in outcomes) else ","
        runs = []
        for number, line in enumerate(lines, start=2):
            labels = list(line) if separator == "" else (line.split(separator) if line else [])
            try:
                runs.append([index[label] for label in labels])
            except KeyError as e:
                raise ValidationError(f"{file_path}:{number}: unknown outcome {e.args[0]!r}")
        if len({len(run) for run in runs}) > 1:
            raise ValidationError(f"{file_path}: runs have different lengths")
        array = np.array(runs, dtype=int).reshape(len(runs), header.get("length", 0))
        return cls(header["seed"], header["protocol"], header["source"], outcomes, array)


def _chunks(count: int, size: int) -> List[int]:
    return [min(size, count - start) for start in range(0, count, size)]


def sample_realizations(
        src: HMCQS,
        proto: DQMP,
        length: int,
        count: int,
        seed: int = 0,
        init: Optional[np.ndarray] = None,
        start: Optional[str] = None,
        keep_states: bool = False,
        chunk: int = SAMPLE_CHUNK) -> SampleRecord:
    """
    Simulate `count` independent runs of `length` measured emissions.

    Runs are drawn in chunks, each chunk with its own generator spawned from
    ``SeedSequence(seed)``, so a record depends only on the seed.

    :param src: HMCQS
    :param proto: DQMP
    :param length: int, outcomes per run
    :param count: int, number of runs
    :param seed: int
    :param init: array, optional, initial source distribution (π by default)
    :param keep_states: bool, keep the hidden state paths
    :return: SampleRecord
    """
    if length < 0 or count < 1:
        raise ValidationError(f"Need length >= 0 and count >= 1, got {length} and {count}")
    if src.dim != proto.dim:
        raise ValidationError(f"Source dimension {src.dim} does not match protocol dimension {proto.dim}")
    n, symbols = len(src.states), len(src.symbols)
    init = src.stationary if init is None else np.asarray(init, dtype=float)
    outcomes = proto.outcomes
    stacked = src.underlying.stacked
    emission_cdf = np.cumsum(stacked.transpose(1, 0, 2).reshape(n, symbols * n), axis=1)

    likelihoods = np.zeros((len(proto.states), symbols, len(outcomes)))
    moves = np.full((len(proto.states), len(outcomes)), -1)
    for s, state in enumerate(proto.states):
        povm = proto.povms[state]
        columns = [outcomes.index(label) for label in povm.labels]
        likelihoods[s][:, columns] = povm.likelihoods(src.amplitudes).T
        for label in povm.labels:
            target = proto.delta.get((state, label))
            if target is not None:
                moves[s, outcomes.index(label)] = proto.states.index(target)
    outcome_cdf = np.cumsum(np.clip(likelihoods, 0.0, None), axis=2)
    start_index = proto.states.index(proto.start if start is None else start)

    sizes = _chunks(count, chunk)
    runs, paths = [], []
    for size, child in zip(sizes, np.random.SeedSequence(seed).spawn(len(sizes))):
        rng = np.random.default_rng(child)
        sigma = rng.choice(n, size=size, p=init / init.sum())
        s = np.full(size, start_index)
        outcome_rows = np.zeros((size, length), dtype=int)
        path = [sigma]
        for t in range(length):
            cdf = emission_cdf[sigma]
            pick = (cdf < rng.random(size)[:, None] * cdf[:, -1:]).sum(axis=1)
            pick = np.minimum(pick, symbols * n - 1)
            x, sigma = pick // n, pick % n
            cdf = outcome_cdf[s, x]
            y = (cdf < rng.random(size)[:, None] * cdf[:, -1:]).sum(axis=1)
            y = np.minimum(y, len(outcomes) - 1)
            s = moves[s, y]
            if np.any(s < 0):
                raise ValidationError(f"Protocol {proto.name!r} has no transition for a sampled outcome")
            outcome_rows[:, t] = y
            path.append(sigma)
        runs.append(outcome_rows)
        paths.append(np.stack(path, axis=1))
    logger.debug("Sampled %d runs of length %d from %s", count, length, src.describe())
    return SampleRecord(seed, proto.name, src.describe(), outcomes, np.concatenate(runs),
                        np.concatenate(paths) if keep_states else None)


def empirical_word_frequencies(record: SampleRecord, length: int, sliding: bool = False) -> WordDistribution:
    """
    Relative frequencies of the length-ℓ outcome words of a record.

    :param record: SampleRecord
    :param length: int, ℓ ≤ record length
    :param sliding: bool, count every window of every run instead of the
        first ℓ outcomes only (meaningful for stationary measured processes)
    :return: WordDistribution
    """
    if not 0 <= length <= record.length:
        raise ValidationError(f"Word length {length} outside 0..{record.length}")
    if length == 0:
        return WordDistribution(0, {(): 1.0})
    if sliding:
        windows = np.lib.stride_tricks.sliding_window_view(record.runs, length, axis=1).reshape(-1, length)
    else:
        windows = record.runs[:, :length]
    words, counts = np.unique(windows, axis=0, return_counts=True)
    return distribution_from_arrays(record.outcomes, words.reshape(-1, length), counts / counts.sum())
