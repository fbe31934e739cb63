"""
Ingesting a concept table
=========================

Parse a tab-separated concept table, drop excluded semantic types and
non-English terms, and summarize the survivors.
"""

import io

from conceptgauge.ingest import (SemanticTypeFilter, corpus_stats,
                                 filter_language, filter_semantic_types,
                                 parse_concepts)

# A miniature concept table: CUI, term, language, pipe-separated types.
RAW = """\
C0001\theart attack\tENG\tDisease or Syndrome
C0002\taspirin\tENG\tPharmacologic Substance
C0003\tHerzinfarkt\tGER\tDisease or Syndrome
C0004\tleech\tENG\tAnimal|Finding
C0005\tblood pressure\tENG\tOrganism Function
C0006\tkidney stone\tENG\tDisease or Syndrome
"""

concepts = parse_concepts(io.StringIO(RAW))
print(f"parsed {len(concepts)} concepts")

# The bundled exclusion list drops chemicals, drugs, organisms, devices...
flt = SemanticTypeFilter.default()
print(f"exclusion list carries {len(flt.excluded)} semantic types")

# A concept is removed when ANY of its types is excluded ('leech' carries
# both Animal and Finding, so it goes).
kept = filter_semantic_types(concepts, flt)
print("after semantic filter:", [c.term for c in kept])

english = filter_language(kept, "ENG")
print("after language filter:", [c.term for c in english])

stats = corpus_stats(english)
print(f"{stats.concept_count} concepts, longest has {stats.max_word_count} words")
