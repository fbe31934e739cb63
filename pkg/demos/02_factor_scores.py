"""
The four factor scores
======================

Brevity, literature frequency, German mappability and dictionary presence,
each normalized to [0, 1], shown on a handful of terms.
"""

from conceptgauge.brevity import brevity_score, tokenize
from conceptgauge.frequency import frequency_score
from conceptgauge.german import CompoundLexicon, TranslationRecord, detect_compound, glm_score
from conceptgauge.lexical import RuleTagger, dp_score, pattern_score, pos_tag

# -- Brevity: 1 - word_count / max_word_count --------------------------------
for term in ("cholesterol", "heart attack", "posttranslational protein modification site"):
    wc = tokenize(term).count
    print(f"brevity({term!r:50s}) = {brevity_score(wc, 202):.4f}  ({wc} words)")

# -- Frequency: log-scaled PubMed hit-count ratio -----------------------------
counts = {"cholesterol": 210_000, "trepanation": 850, "zqxjv": 0}
max_count = max(counts.values())
for term, count in counts.items():
    print(f"frequency({term!r:15s}) = {frequency_score(count, max_count):.4f}  ({count} hits)")

# -- German mappability: compact translations score high ----------------------
lexicon = CompoundLexicon.default()
print("Blutdrucktest is a compound:", detect_compound("Blutdrucktest", lexicon))

compact = TranslationRecord("blood pressure test", 3, "Blutdrucktest", 1, True)
wordy = TranslationRecord("acute kidney injury", 3, "Akute Verletzung der Niere", 4, False)
print(f"glm(blood pressure test -> Blutdrucktest)         = {glm_score(compact)}")
print(f"glm(acute kidney injury -> Akute Verletzung ...)  = {glm_score(wordy)}")

# -- Dictionary presence + grammatical pattern --------------------------------
tagger = RuleTagger.default()
for term in ("heart disease", "chronic pain", "pain in chest", "blood pressure measurement"):
    tags = pos_tag(tokenize(term).tokens, tagger)
    score = pattern_score(tags)
    print(f"pattern({term!r:28s}) = {score:.2f}  tags={tags}")

# A dictionary headword dominates whatever the pattern said.
print("dp(present, weak pattern) =", dp_score(True, 0.4))
print("dp(absent,  0.90 pattern) =", dp_score(False, 0.90))
