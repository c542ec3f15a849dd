from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple
import json

import numpy as np

from core.errors import MalformedInput, ShapeMismatch, SpecMismatch
from rings.dataclasses import RingSpec, RingTowerElement

Row = Tuple[RingTowerElement, ...]


@dataclass(frozen=True)
class Matrix:
    """
    Schema for a dense matrix over one ring of the tower family.
    Matrices act on row vectors: x -> xA.
    """
    spec: RingSpec
    rows: int
    cols: int
    entries: Tuple[Row, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise ShapeMismatch(f"entries do not form a {self.rows}x{self.cols} matrix")
        for row in self.entries:
            for entry in row:
                if entry.spec != self.spec:
                    raise SpecMismatch(f"entry {entry} does not live in {self.spec}")

    #-------- Constructors --------

    @staticmethod
    def zero(spec: RingSpec, rows: int, cols: int) -> "Matrix":
        zero = RingTowerElement.zero(spec)
        return Matrix(spec, rows, cols, tuple((zero,) * cols for _ in range(rows)))

    @staticmethod
    def identity(spec: RingSpec, size: int) -> "Matrix":
        zero, one = RingTowerElement.zero(spec), RingTowerElement.one(spec)
        return Matrix(spec, size, size, tuple(
            tuple(one if i == j else zero for j in range(size)) for i in range(size)
        ))

    @staticmethod
    def from_rows(spec: RingSpec, rows: Sequence[Sequence], cols: Optional[int] = None) -> "Matrix":
        """
        Builds a matrix from nested rows whose entries are elements, integers
        or serialized element lists. `cols` is needed only when rows is empty.
        """
        converted = tuple(tuple(_to_element(spec, entry) for entry in row) for row in rows)
        if cols is None:
            cols = len(converted[0]) if converted else 0
        return Matrix(spec, len(converted), cols, converted)

    @staticmethod
    def from_array(spec: RingSpec, array: np.ndarray) -> "Matrix":
        """
        Wraps an integer array as a matrix over the scalar ring spec.
        """
        if not spec.is_scalar:
            raise SpecMismatch(f"integer arrays only describe matrices over Z/p^m, not {spec}")
        array = np.asarray(array, dtype=np.int64)
        if array.ndim != 2:
            raise ShapeMismatch("expected a two-dimensional array")
        return Matrix(spec, array.shape[0], array.shape[1], tuple(
            tuple(RingTowerElement.constant(spec, int(x)) for x in row) for row in array
        ))

    def to_array(self) -> np.ndarray:
        if not self.spec.is_scalar:
            raise SpecMismatch(f"{self.spec} is not Z/p^m; expand scalars first")
        array = np.zeros((self.rows, self.cols), dtype=np.int64)
        for i, row in enumerate(self.entries):
            for j, entry in enumerate(row):
                array[i, j] = entry.constant_term()
        return array

    #-------- Access --------

    def entry(self, i: int, j: int) -> RingTowerElement:
        return self.entries[i][j]

    def row(self, i: int) -> Row:
        return self.entries[i]

    def column(self, j: int) -> Row:
        return tuple(row[j] for row in self.entries)

    def is_zero(self) -> bool:
        return all(entry.is_zero() for row in self.entries for entry in row)

    def has_unit_entry(self) -> bool:
        return any(entry.is_unit() for row in self.entries for entry in row)

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> "Matrix":
        return Matrix(self.spec, len(row_indices), len(col_indices), tuple(
            tuple(self.entries[i][j] for j in col_indices) for i in row_indices
        ))

    def without(self, row: Optional[int] = None, col: Optional[int] = None) -> "Matrix":
        """
        The matrix with one row and/or one column removed.
        """
        row_indices = [i for i in range(self.rows) if i != row]
        col_indices = [j for j in range(self.cols) if j != col]
        return self.submatrix(row_indices, col_indices)

    #-------- Arithmetic --------

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix) or other.spec != self.spec:
            raise SpecMismatch(f"cannot combine matrices over {self.spec} and {getattr(other, 'spec', other)}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch(f"cannot add {self.rows}x{self.cols} and {other.rows}x{other.cols}")
        return Matrix(self.spec, self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(left, right)) for left, right in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> "Matrix":
        return self.apply(lambda entry: -entry)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        if self.spec.is_scalar:
            product = np.mod(self.to_array() @ other.to_array(), self.spec.modulus)
            return Matrix.from_array(self.spec, product)
        zero = RingTowerElement.zero(self.spec)
        columns = [other.column(j) for j in range(other.cols)]
        entries = []
        for row in self.entries:
            out = []
            for column in columns:
                total = zero
                for a, b in zip(row, column):
                    if a and b:
                        total = total + a * b
                out.append(total)
            entries.append(tuple(out))
        return Matrix(self.spec, self.rows, other.cols, tuple(entries))

    def scale(self, factor) -> "Matrix":
        return self.apply(lambda entry: entry * factor)

    def transpose(self) -> "Matrix":
        return Matrix(self.spec, self.cols, self.rows, tuple(self.column(j) for j in range(self.cols)))

    def apply(self, function: Callable[[RingTowerElement], RingTowerElement], spec: Optional[RingSpec] = None) -> "Matrix":
        """
        Applies function entrywise; spec is the ring of the results when it changes.
        """
        return Matrix(spec or self.spec, self.rows, self.cols, tuple(
            tuple(function(entry) for entry in row) for row in self.entries
        ))

    def apply_map(self, ring_map) -> "Matrix":
        """
        Base change along a ring map.
        """
        if ring_map.source != self.spec:
            raise SpecMismatch(f"map starts at {ring_map.source}, matrix lives over {self.spec}")
        return self.apply(ring_map, ring_map.target)

    #-------- Assembly --------

    @staticmethod
    def stack(blocks: Sequence["Matrix"], spec: RingSpec, cols: int) -> "Matrix":
        """
        Vertical concatenation; spec and cols describe the result when blocks is empty.
        """
        entries: List[Row] = []
        for block in blocks:
            if block.spec != spec or block.cols != cols:
                raise ShapeMismatch(f"cannot stack a {block.rows}x{block.cols} block into {cols} columns")
            entries.extend(block.entries)
        return Matrix(spec, len(entries), cols, tuple(entries))

    @staticmethod
    def hstack(blocks: Sequence["Matrix"], spec: RingSpec, rows: int) -> "Matrix":
        return Matrix.stack([block.transpose() for block in blocks], spec, rows).transpose()

    @staticmethod
    def block_diagonal(blocks: Sequence["Matrix"], spec: RingSpec) -> "Matrix":
        zero = RingTowerElement.zero(spec)
        cols = sum(block.cols for block in blocks)
        entries: List[Row] = []
        offset = 0
        for block in blocks:
            for row in block.entries:
                entries.append((zero,) * offset + row + (zero,) * (cols - offset - block.cols))
            offset += block.cols
        return Matrix(spec, len(entries), cols, tuple(entries))

    #-------- Serialization --------

    def to_list(self) -> List:
        """
        Row-major nested arrays of serialized elements.
        """
        return [[entry.to_list() for entry in row] for row in self.entries]

    def serialize(self) -> str:
        return json.dumps(self.to_list())

    @staticmethod
    def from_list(spec: RingSpec, data, cols: Optional[int] = None) -> "Matrix":
        if not isinstance(data, list) or any(not isinstance(row, list) for row in data):
            raise MalformedInput(f"matrix must be a list of rows, got {data!r}")
        widths = {len(row) for row in data}
        if len(widths) > 1:
            raise MalformedInput("matrix rows have different lengths")
        return Matrix.from_rows(spec, data, cols)

    @staticmethod
    def deserialize(spec: RingSpec, data: str) -> "Matrix":
        return Matrix.from_list(spec, json.loads(data))

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(entry) for entry in row) for row in self.entries) + "]"


@dataclass(frozen=True)
class HowellForm:
    """
    Schema for the Howell form H of a matrix A over Z/p^m together with the
    transformation U satisfying U @ A = H. H has no zero rows, so the zero
    matrix has the empty Howell form.
    """
    H: Matrix
    U: Matrix
    pivots: Tuple[Tuple[int, int], ...]

    def to_dict(self):
        return {"H": self.H.to_list(), "U": self.U.to_list(), "pivots": [list(pivot) for pivot in self.pivots]}


#-------- Helper Functions --------

def _to_element(spec: RingSpec, entry) -> RingTowerElement:
    if isinstance(entry, RingTowerElement):
        if entry.spec != spec:
            raise SpecMismatch(f"entry {entry} does not live in {spec}")
        return entry
    if isinstance(entry, (int, np.integer)):
        return RingTowerElement.constant(spec, int(entry))
    return RingTowerElement.from_list(spec, entry)
