"""Text-to-SQL data augmentation toolkit (Python bindings)."""

import json as _json

from ._sqlaug import (  # noqa: F401
    Error,
    InvariantError,
    ModelError,
    ParseError,
    ResolutionError,
    Schema,
    SqlError,
    canonical_sql,
    deconstruct,
    exact_match,
    extract_entity_sequence,
    load_examples,
    load_schemas,
    make_toy,
    normalized_entropy,
    normalized_mutual_information,
    parse_schemas,
    run_cli,
    sketch,
)


def dataset_stats(examples, schemas):
    """Statistics of (question, sql, db_id) triples as a dict."""
    from ._sqlaug import _dataset_stats_json

    return _json.loads(_dataset_stats_json(list(examples), list(schemas)))


def cli(*args):
    """Runs `sqlaug <args>`; returns (exit_code, stdout, stderr)."""
    return run_cli([str(a) for a in args])
