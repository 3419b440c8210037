"""JSON Schemas for everything the command line emits with ``--json``."""

_NUMBER_STR = {"type": "string"}
_COMPLEX = {
    "type": "object",
    "required": ["re", "im"],
    "properties": {"re": _NUMBER_STR, "im": _NUMBER_STR},
    "additionalProperties": False,
}
_NULLABLE_COMPLEX = {"anyOf": [_COMPLEX, {"type": "null"}]}
_NULLABLE_STR = {"type": ["string", "null"]}

CASE = {
    "type": "object",
    "required": ["index", "params", "lhs", "rhs", "residual", "status", "terms",
                 "in_domain", "pass", "counted", "message"],
    "properties": {
        "index": {"type": "integer", "minimum": 0},
        "params": {"type": "object", "additionalProperties": {"type": ["string", "integer"]}},
        "lhs": _NULLABLE_COMPLEX,
        "rhs": _NULLABLE_COMPLEX,
        "residual": _NULLABLE_STR,
        "status": {"enum": ["Converged", "MaxTermsExceeded", "Diverging", "Pole", "SchemaError"]},
        "terms": {"type": "integer", "minimum": 0},
        "in_domain": {"type": "boolean"},
        "pass": {"type": "boolean"},
        "counted": {"type": "boolean"},
        "message": {"type": "string"},
    },
    "additionalProperties": False,
}

VERIFICATION_REPORT = {
    "type": "object",
    "required": ["id", "digits", "seed", "profile", "requested", "empty", "pass",
                 "max_residual", "flagged", "cases"],
    "properties": {
        "id": {"type": "string"},
        "digits": {"type": "integer", "minimum": 20},
        "seed": {"type": "integer"},
        "profile": {"enum": ["real", "complex"]},
        "requested": {"type": "integer", "minimum": 0},
        "empty": {"type": "boolean"},
        "pass": {"type": "boolean"},
        "max_residual": _NULLABLE_STR,
        "flagged": {"type": "integer", "minimum": 0},
        "cases": {"type": "array", "items": CASE},
        "wall_time": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}

VERIFY_ALL = {
    "type": "object",
    "required": ["pass", "reports"],
    "properties": {
        "pass": {"type": "boolean"},
        "reports": {"type": "array", "items": VERIFICATION_REPORT},
    },
    "additionalProperties": False,
}

TREND_REPORT = {
    "type": "object",
    "required": ["edge", "parameter", "schedule", "gaps", "decreasing", "final_gap", "target", "pass"],
    "properties": {
        "edge": {"type": "string"},
        "parameter": _NULLABLE_STR,
        "schedule": {"type": "array", "items": {"type": "string"}},
        "gaps": {"type": "array", "items": {"type": "string"}},
        "decreasing": {"type": "boolean"},
        "final_gap": {"type": "string"},
        "target": _NULLABLE_STR,
        "pass": {"type": "boolean"},
    },
    "additionalProperties": False,
}

DESCRIBE = {
    "type": "object",
    "required": ["id", "summary", "formula", "parameters", "constraints", "convergence", "bilateral"],
    "properties": {
        "id": {"type": "string"},
        "summary": {"type": "string"},
        "formula": {"type": "string"},
        "parameters": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "kind", "note"],
                "properties": {
                    "name": {"type": "string"},
                    "kind": {"enum": ["complex", "integer"]},
                    "note": {"type": "string"},
                },
            },
        },
        "constraints": {"type": "array", "items": {"type": "string"}},
        "convergence": _NULLABLE_STR,
        "bilateral": {"type": "boolean"},
    },
}

LIST = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["id", "summary"],
        "properties": {"id": {"type": "string"}, "summary": {"type": "string"}},
    },
}

EVAL = {
    "type": "object",
    "required": ["id", "digits", "params", "side"],
    "properties": {
        "id": {"type": "string"},
        "digits": {"type": "integer"},
        "params": {"type": "object"},
        "side": {"enum": ["lhs", "rhs", "both"]},
        "lhs": _COMPLEX,
        "rhs": _COMPLEX,
        "status": {"enum": ["Converged", "MaxTermsExceeded", "Diverging"]},
        "terms": {"type": "integer"},
        "residual": {"type": "string"},
        "in_domain": {"type": "boolean"},
        "pass": {"type": "boolean"},
        "error": {"type": "string"},
    },
}

SCHEMAS = {
    "list": LIST,
    "describe": DESCRIBE,
    "eval": EVAL,
    "verify": VERIFICATION_REPORT,
    "verify-all": VERIFY_ALL,
    "limits": TREND_REPORT,
}
