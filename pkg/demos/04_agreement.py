"""
Inter-rater agreement
=====================

Krippendorff's alpha over rating matrices with missing cells, the 5-level
survey scale, and treating the metric itself as one more rater.
"""

from conceptgauge.reliability import (RatingMatrix, krippendorff_alpha,
                                      map_rating, metric_agreement)

# The five survey answers fold onto three buckets.
for level in (5, 4, 3, 2, 1):
    print(f"level {level} -> {map_rating(level)}")
print()

# Three raters, a dozen concepts, some cells missing (None = not rated).
ratings = {
    "P1": ["Good", "Good", "Moderate", "Bad", "Good", None, "Bad", "Good",
           "Moderate", "Bad", "Good", None],
    "P2": ["Good", "Moderate", "Moderate", "Bad", "Good", "Good", "Bad",
           "Good", "Bad", "Bad", None, "Moderate"],
    "P3": [None, "Good", "Moderate", "Bad", "Moderate", "Good", "Bad",
           "Good", "Moderate", "Bad", "Good", "Moderate"],
}
matrix = RatingMatrix()
for rater, row in ratings.items():
    for i, value in enumerate(row):
        if value is not None:
            matrix.add(rater, f"C{i:02d}", value)

result = krippendorff_alpha(matrix)
print("all raters:", result)

# Suppose the metric bucketed the same concepts like P1 did, except two.
buckets = {f"C{i:02d}": v for i, v in enumerate(ratings["P1"]) if v}
buckets["C03"] = "Moderate"
buckets["C09"] = "Moderate"
print("metric vs raters:", metric_agreement(buckets, matrix))
