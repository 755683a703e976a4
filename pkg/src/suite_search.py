"""
Fuzzy lookup of verification suites.

Suite names are short and easy to mistype ("subplain", "scrol"), so the CLI
ranks the catalog with rapidfuzz instead of demanding an exact match.

Features:
- Weighted scoring over suite name and description (name: 3x, description: 1x)
- Typo tolerance using rapidfuzz partial ratios
- "did you mean" suggestions for UnknownSuite
"""

from typing import Any, Dict, List, Mapping

from rapidfuzz import fuzz

# Field weight constants
WEIGHT_NAME = 3.0
WEIGHT_DESCRIPTION = 1.0

DEFAULT_THRESHOLD = 40


class SuiteSearch:
    """
    Fuzzy search over a {suite name: description} catalog.

    Example:
        >>> engine = SuiteSearch({"spread": "Bose spread partition", "scroll": "scrolls"})
        >>> engine.search("sprad")[0]["name"]
        'spread'
    """

    def __init__(self, catalog: Mapping[str, str]):
        self.catalog = dict(catalog)

    def search(self, query: str, threshold: int = DEFAULT_THRESHOLD) -> List[Dict[str, Any]]:
        """
        Rank suites against `query`.

        Returns:
            List of dicts with 'name', 'description' and 'score' keys, best
            first. An empty query lists every suite in catalog order with
            score 100.
        """
        if not query or not query.strip():
            return [
                {"name": name, "description": desc, "score": 100.0}
                for name, desc in self.catalog.items()
            ]

        query = query.strip().lower()
        results = []
        for name, description in self.catalog.items():
            score = self._calculate_score(name, description, query)
            if score >= threshold:
                results.append({"name": name, "description": description, "score": score})

        # Stable on ties: catalog order
        results.sort(key=lambda x: x["score"], reverse=True)
        return results

    def _calculate_score(self, name: str, description: str, query: str) -> float:
        name_score = fuzz.ratio(query, name.lower(), score_cutoff=0)
        name_score = max(name_score, fuzz.partial_ratio(query, name.lower(), score_cutoff=0))
        scores = [name_score * WEIGHT_NAME]
        total_weight = WEIGHT_NAME

        if description:
            desc_score = fuzz.partial_ratio(query, description.lower(), score_cutoff=0)
            scores.append(desc_score * WEIGHT_DESCRIPTION)
            total_weight += WEIGHT_DESCRIPTION

        return round(sum(scores) / total_weight, 2)
