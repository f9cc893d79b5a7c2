import re
from typing import NamedTuple, Iterator

from .exceptions import AsmSyntaxError
from .globals import Gl


class Token(NamedTuple):
    kind: str
    value: object
    line: int
    column: int

    def __repr__(self) -> str:
        return f"{self.kind} {self.value!r} @{self.line}:{self.column}"


# token kinds
KEYWORD = "keyword"
IDENT = "ident"
VAR = "var"
INT = "int"
REAL = "real"
STRING = "string"
SYMBOL = "symbol"
COMMENT = "comment"
EOF = "eof"

ASMETAL_KEYWORDS = frozenset("""
    asm module import export signature definitions domain enum abstract basic
    subsetof dynamic static derived controlled monitored shared out function
    rule macro turbo main default init agent invariant over LTLSPEC NAME
    if then else endif switch case otherwise endswitch choose in with do
    ifnone endchoose forall endforall exist exists par endpar seq endseq
    let endlet skip true false undef and or not implies iff xor mod
    program self isUndef Prod Seq
""".split())

ASMETAL_SYMBOLS = (
    ":=", "->", "..", "!=", "<=", ">=",
    "=", "<", ">", "+", "-", "*", "/", "(", ")", "[", "]", "{", "}",
    ",", ":", "|",
)

BIR_KEYWORDS = frozenset("""
    system fun returns typealias enum record thread main active loc when do
    invisible goto start new assert true false null
""".split())

BIR_SYMBOLS = (
    ":=", "==", "!=", "<=", ">=", "&&", "||",
    "=", "<", ">", "+", "-", "*", "/", "%", "!", "?", "(", ")", "{", "}",
    ",", ":", ";", ".",
)


class Lexer:
    """
    Regex driven tokenizer shared by the AsmetaL front end and the
    textual IR reader; each dialect brings its keyword and symbol sets.
    """

    def __init__(self, keywords: frozenset, symbols: tuple, keep_comments: bool = False,
                 error_class=AsmSyntaxError):
        self.keywords = keywords
        self.keep_comments = keep_comments
        self.error_class = error_class
        sym = "|".join(re.escape(s) for s in sorted(symbols, key=len, reverse=True))
        self.pattern = re.compile(
            r"(?P<ws>[ \t\r\f\v]+)"
            r"|(?P<nl>\n)"
            r"|(?P<line_comment>//[^\n]*)"
            r"|(?P<block_comment>/\*.*?\*/)"
            r"|(?P<real>\d+\.\d+)"
            r"|(?P<int>\d+)"
            r'|(?P<string>"(?:[^"\\\n]|\\.)*")'
            r"|(?P<var>\$[A-Za-z_][A-Za-z0-9_]*)"
            r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
            rf"|(?P<symbol>{sym})",
            re.DOTALL,
        )

    def tokens(self, source: str, filename: str = None) -> Iterator[Token]:
        pos = 0
        line = 1
        line_start = 0
        end = len(source)
        while pos < end:
            m = self.pattern.match(source, pos)
            if m is None:
                raise self.error_class(f"illegal character {source[pos]!r}",
                                       line, pos - line_start + 1, filename)
            kind = m.lastgroup
            text = m.group()
            column = pos - line_start + 1
            if kind == "nl":
                line += 1
                line_start = m.end()
            elif kind == "block_comment":
                newlines = text.count("\n")
                if newlines:
                    line += newlines
                    line_start = pos + text.rfind("\n") + 1
            elif kind == "line_comment":
                if self.keep_comments:
                    yield Token(COMMENT, text[2:].strip(), line, column)
            elif kind == "int":
                value = int(text)
                if value > Gl.INT_MAX + 1:
                    raise self.error_class(f"integer literal {text} exceeds 64 bits", line, column, filename)
                yield Token(INT, value, line, column)
            elif kind == "real":
                yield Token(REAL, float(text), line, column)
            elif kind == "string":
                yield Token(STRING, bytes(text[1:-1], "utf-8").decode("unicode_escape"), line, column)
            elif kind == "var":
                yield Token(VAR, text, line, column)
            elif kind == "ident":
                yield Token(KEYWORD if text in self.keywords else IDENT, text, line, column)
            elif kind == "symbol":
                yield Token(SYMBOL, text, line, column)
            pos = m.end()
        yield Token(EOF, None, line, pos - line_start + 1)


_asmetal_lexer = Lexer(ASMETAL_KEYWORDS, ASMETAL_SYMBOLS)


def tokenize(source: str, filename: str = None) -> list[Token]:
    """Tokenize AsmetaL source; `//` and `/* */` comments are discarded."""
    return list(_asmetal_lexer.tokens(source, filename))
