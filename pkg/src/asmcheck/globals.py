

class Gl:

    """Class of term strings"""
    # tool
    TOOL_NAME = "asm-check"
    VERSION = "0.1.0"

    # domain kinds
    BASIC = "basic"
    ENUM = "enum"
    ABSTRACT = "abstract"
    AGENT_SUBSET = "agent-subset"
    CONCRETE_SUBSET = "concrete-subset"
    SEQUENCE = "sequence"
    PRODUCT = "product"

    # function kinds
    STATIC = "static"
    DERIVED = "derived"
    CONTROLLED = "controlled"
    MONITORED = "monitored"
    STATIC_CONST = "static-const"

    # basic AsmetaL domains and their IR primitives
    BOOLEAN = "Boolean"
    INTEGER = "Integer"
    NATURAL = "Natural"
    STRING = "String"
    CHAR = "Char"
    REAL = "Real"
    UNDEF = "Undef"
    AGENT = "Agent"
    BASIC_DOMAINS = {
        BOOLEAN: "boolean",
        INTEGER: "int",
        NATURAL: "int",
        STRING: "string",
        CHAR: "string",
        REAL: "float",
        UNDEF: "null",
    }
    UNBOUNDED_DOMAINS = (INTEGER, NATURAL, STRING, CHAR, REAL)

    # IR primitive type names
    IR_BOOLEAN = "boolean"
    IR_INT = "int"
    IR_STRING = "string"
    IR_FLOAT = "float"
    IR_NULL = "null"

    # 64-bit signed integer range
    INT_MIN = -(2 ** 63)
    INT_MAX = 2 ** 63 - 1

    # AsmetaL binary operators -> IR operators
    BINARY_OPS = {
        "+": "+",
        "-": "-",
        "*": "*",
        "/": "/",
        "mod": "%",
        "=": "==",
        "!=": "!=",
        "<": "<",
        "<=": "<=",
        ">": ">",
        ">=": ">=",
        "and": "&&",
        "or": "||",
    }
    DERIVED_OPS = ("implies", "iff", "xor")

    # LTL operator names as written in models
    LTL_ALWAYS = "g"
    LTL_EVENTUALLY = "f"
    LTL_UNTIL = "u"
    LTL_RELEASE = "v"

    # sequence operations
    SEQ_EXPRESSIONS = (
        "create", "isEmpty", "contains", "count", "length", "indexOf",
        "first", "last", "atIndex", "tail", "union", "subSequence",
    )
    SEQ_ACTIONS = ("append", "prepend", "insertAt", "replaceAt", "excluding")
    # AsmetaL spellings that differ from the IR names
    SEQ_ALIASES = {"at": "atIndex"}

    # translation
    MAX_INLINE_DEPTH = 64
    MAX_CHAIN_LENGTH = 100_000
    MAIN_THREAD = "MAIN"
    MAIN_KIND = "main"
    INIT_LOCATION = "loc0"
    FIRST_LOCATION = "loc1"
    END_LOCATION = "endloc"
    MONITORED_SUFFIX = "_monitored"
    SELF = "self"

    # validation finding severities
    ERROR = "error"
    WARNING = "warning"

    # validation finding codes
    INFINITE_QUANTIFICATION = "infinite-quantification"
    UNBOUNDED_ARGUMENT = "unbounded-argument-domain"
    UNBOUNDED_MONITORED = "unbounded-monitored-codomain"
    UNSUPPORTED_BODY = "unsupported-function-body"
    UNDECLARED_ELEMENTS = "undeclared-abstract-elements"
    MISSING_EXTENSION = "missing-subset-extension"
    PROGRAM_OUTSIDE_AGENT = "program-outside-agent-choice"
    INIT_NOT_CONTROLLED = "init-not-controlled"
    UNINITIALIZED = "uninitialized-controlled-location"

    # verdict outcomes
    HOLDS = "holds"
    VIOLATED = "violated"
    OUTCOME_ERROR = "error"

    # verdict kinds
    DEADLOCK = "deadlock"
    ASSERTION = "assertion"
    LTL = "ltl"

    # report formats
    FORMAT_CONSOLE = "console"
    FORMAT_JSON = "json"
    FORMAT_TEXT = "text"

    # CLI modes and exit codes
    MODE_CHECK = "check"
    MODE_EMIT = "emit"
    MODE_VALIDATE = "validate"
    MODE_RUNS = "runs"
    EXIT_OK = 0
    EXIT_VIOLATION = 1
    EXIT_MODEL_ERROR = 2
    EXIT_IO_ERROR = 3
    ENV_MAX_STATES = "ASM_CHECK_MAX_STATES"

    # run log columns
    TIME_STAMP = "timestamp"
    MODEL = "model"
    PROPERTY = "property"
    OUTCOME = "outcome"
    STATES = "states"
    TRANSITIONS = "transitions"
    MATCHED_STATES = "matched_states"
    MAX_DEPTH = "max_depth"
    SECONDS = "seconds"
