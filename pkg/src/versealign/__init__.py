"""Local-alignment distances for symbolic verse encodings.

The package turns lines of verse, encoded over a four-symbol alphabet
of stressed and unstressed syllables, word breaks, and line ends, into
pairwise distances, hierarchical clusterings, and classification
benchmarks.  Synthetic corpora for five classical twelve-syllable forms
are built in.
"""

from .alphabet import (
    ALPHABET,
    AlphabetError,
    CanonicalViolationError,
    EmptyStringError,
    InvalidSymbolError,
    Line,
    MetronomeString,
    Symbol,
    canonicalize,
    parse,
    render,
    split_lines,
)
from .align import AlignmentResult, local_align, local_score, naive_local, uniform_local
from .cluster import (
    Dendrogram,
    Merge,
    Partition,
    adjusted_rand_index,
    agglomerate,
    cut,
    load_partition,
    partition_from_labels,
    save_partition,
    to_newick,
)
from .corpus import CorpusFormatError, CorpusRecord, read_corpus, write_corpus
from .distance import (
    DistanceMatrix,
    distance_matrix,
    naive_distance_matrix,
    naive_pair_distance,
    pair_distance,
    pair_similarity,
    self_score,
)
from .evaluate import EvalConfig, EvalReport, Method, knn_loo, run_evaluation
from .scoring import (
    InvariantError,
    SchemaError,
    SchemeError,
    SchemeKind,
    ScoreScheme,
    builtin_scheme,
    default_scheme,
    load_scheme,
    save_scheme,
    uniform_scheme,
)
from .simulate import (
    FORM_NAMES,
    BenchResult,
    FormSpec,
    WordLengthDist,
    ari_benchmark,
    builtin_form,
    generate_corpus,
    generate_line,
    generate_poem,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHABET",
    "AlphabetError",
    "AlignmentResult",
    "BenchResult",
    "CanonicalViolationError",
    "CorpusFormatError",
    "CorpusRecord",
    "Dendrogram",
    "DistanceMatrix",
    "EmptyStringError",
    "EvalConfig",
    "EvalReport",
    "FORM_NAMES",
    "FormSpec",
    "InvalidSymbolError",
    "InvariantError",
    "Line",
    "Merge",
    "Method",
    "MetronomeString",
    "Partition",
    "SchemaError",
    "SchemeError",
    "SchemeKind",
    "ScoreScheme",
    "Symbol",
    "WordLengthDist",
    "adjusted_rand_index",
    "agglomerate",
    "ari_benchmark",
    "builtin_form",
    "builtin_scheme",
    "canonicalize",
    "cut",
    "default_scheme",
    "distance_matrix",
    "generate_corpus",
    "generate_line",
    "generate_poem",
    "knn_loo",
    "load_partition",
    "load_scheme",
    "local_align",
    "local_score",
    "naive_distance_matrix",
    "naive_local",
    "naive_pair_distance",
    "pair_distance",
    "pair_similarity",
    "parse",
    "partition_from_labels",
    "read_corpus",
    "render",
    "run_evaluation",
    "save_partition",
    "save_scheme",
    "self_score",
    "split_lines",
    "to_newick",
    "uniform_local",
    "uniform_scheme",
    "write_corpus",
]
