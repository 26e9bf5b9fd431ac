"""Ready-made spanners used by the demos, the CLI and the tests."""

from .vafile import parse_automaton

# Extracts whitespace-delimited tokens of the form local@domain as variable x.
EMAIL_PATTERN = "(.* )?x{[^@ ]+@[^@ ]+}( .*)?"

EMAIL_DOCUMENT = b"a a@b b@c"

# The same extraction as a normalized extended VA: ev-states 0 2 3 5 7 9 11,
# letter-states 1 4 6 8 10 12. States 1-3 skip a prefix ending in a space,
# 4-9 read local@domain while x is open, 10-12 skip a suffix.
EMAIL_EVA = """\
eva
vars x
states 13
initial 0
final 10 12
ev 0 [] 1
t 1 any 2
ev 2 [] 1
t 1 ' ' 3
ev 0 [+x] 4
ev 3 [+x] 4
t 4 except:' @' 5
ev 5 [] 6
t 6 except:' @' 5
t 6 '@' 7
ev 7 [] 8
t 8 except:' @' 9
ev 9 [] 8
ev 9 [-x] 10
t 10 ' ' 11
ev 11 [] 12
t 12 any 11
"""


def email_eva():
    return parse_automaton(EMAIL_EVA)
