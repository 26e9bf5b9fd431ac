"""
Extracting email-like tokens
============================

A walk through the whole pipeline on a nine-byte document: pattern,
automaton, product DAG, jump index and the output stream.
"""

# The pattern captures a token around an '@' into the variable x.  The
# optional prefix and suffix anchor the capture on word boundaries.
import spanrun

pattern = spanrun.EMAIL_PATTERN
document = spanrun.EMAIL_DOCUMENT
print("pattern :", pattern)
print("document:", document)

# %%
# Compiling gives a variable-set automaton.  It is sequential, so every
# accepting run describes a well-formed mapping.
a = spanrun.compile_pattern(pattern)
print("states:", a.state_count, "sequential:", bool(spanrun.check_sequential(a)))

# %%
# The same spanner written by hand as an extended automaton, where one
# transition may read several markers at once.
eva = spanrun.email_eva()
print(spanrun.dump_automaton(eva))

# %%
# Product with the document: one level per position, plus a final sink.
# Trimming drops every vertex that is not on a full path.
raw = spanrun.product_dag_extended(eva, document)
dag = spanrun.sort_adjacency(spanrun.trim_dag(raw))
print("raw     :", raw.stats())
print("trimmed :", dag.stats())

# %%
# The jump index records, per level, the levels where something can be
# captured next.  From level 3 the next capture decisions sit at 5 and 6.
index = spanrun.JumpIndex.build(dag)
for level in range(dag.depth):
    print(level, sorted(index.rlevels(level)))

# %%
# Enumeration streams each mapping once.  The stream keeps counters that
# show the cost between consecutive outputs.
stream = spanrun.enumerate_mappings(dag, index, mode="extended")
for m in stream:
    spans = spanrun.mapping_to_spans(m, 1)
    print(spans[0], document[spans[0].begin:spans[0].end])
stats = stream.stats()
print({k: stats[k] for k in ("outputs", "max_delay_steps", "peak_stack", "peak_memory_words")})

# %%
# The VA route gives the same answer without expanding anything.
print(spanrun.mappings(pattern, document))
