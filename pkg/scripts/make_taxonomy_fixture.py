#!/usr/bin/env python3
"""Generate the directory-shaped taxonomy snapshot used by tests and demos.

Seventeen historical top-level categories, a deterministic spread of
second-level topics (the profile-topic cut), a sprinkling of third-level
children, and submitted-page summaries for a subset. Output is frozen in
fixtures/; re-running reproduces the same bytes.
"""
from __future__ import annotations

import os
import random

TOP_LEVEL = [
    "Adult", "Arts", "Business", "Computers", "Games", "Health", "Home",
    "Kids_and_Teens", "News", "Recreation", "Reference", "Regional",
    "Science", "Shopping", "Society", "Sports", "World",
]

SECOND_LEVEL_WORDS = [
    "History", "Theory", "Directories", "Organizations", "Education",
    "Software", "Hardware", "Research", "Resources", "Associations",
    "Publications", "Events", "People", "Products", "Services",
    "Methods", "Tools", "Regions", "Archives", "Communities",
    "Standards", "Policy", "Culture", "Industry", "Training",
    "Journals", "Collecting", "Outdoors", "Travel", "Equipment",
    "Museums", "Libraries", "Conservation", "Technology", "Media",
]

FLAVOR = {
    "Adult": "content regulation access restricted material",
    "Arts": "painting literature theatre performance galleries artists",
    "Business": "companies commerce finance marketing management trade",
    "Computers": "software programming hardware networks algorithms data",
    "Games": "video board card puzzles players strategy tournaments",
    "Health": "medicine wellness fitness nutrition hospitals therapy",
    "Home": "family cooking gardening repair household furnishing",
    "Kids_and_Teens": "school learning safety entertainment young readers",
    "News": "journalism newspapers broadcasting headlines reporters press",
    "Recreation": "hobbies travel outdoors camping boating collecting",
    "Reference": "encyclopedias dictionaries maps quotations knowledge facts",
    "Regional": "countries cities localities geography municipalities maps",
    "Science": "research physics chemistry biology astronomy mathematics",
    "Shopping": "stores retail catalogs wares bargains consumers",
    "Society": "issues philosophy religion law government organizations",
    "Sports": "athletics teams leagues championships players coaching",
    "World": "languages international translations global cultures nations",
}


def main() -> None:
    rng = random.Random(20090615)
    out_dir = os.path.join(os.path.dirname(__file__), "..", "fixtures")
    os.makedirs(out_dir, exist_ok=True)

    taxonomy_lines = ["Top\tTop\tthe root of the web directory"]
    pages_lines = []
    for top in TOP_LEVEL:
        flavor = FLAVOR[top]
        taxonomy_lines.append(f"Top/{top}\t{top.replace('_', ' ')}\t{flavor}")
        n_children = 12 + rng.randrange(8)
        children = rng.sample(SECOND_LEVEL_WORDS, n_children)
        for child in sorted(children):
            path = f"Top/{top}/{child}"
            words = flavor.split()
            desc = " ".join(
                [child.lower()] + rng.sample(words, min(4, len(words)))
            )
            taxonomy_lines.append(f"{path}\t{child}\t{desc}")
            if rng.random() < 0.25:
                taxonomy_lines.append(
                    f"{path}/General\tGeneral\tgeneral {child.lower()} {rng.choice(words)}"
                )
            if rng.random() < 0.5:
                pages_lines.append(
                    f"{path}\t{child} portal\t"
                    f"{child.lower()} {' '.join(rng.sample(words, min(5, len(words))))}"
                )

    with open(os.path.join(out_dir, "odp_snapshot.tsv"), "w", encoding="utf-8") as fh:
        fh.write("# path\ttitle\tdescription\n")
        fh.write("\n".join(taxonomy_lines) + "\n")
    with open(os.path.join(out_dir, "odp_pages.tsv"), "w", encoding="utf-8") as fh:
        fh.write("# path\tpage_title\tpage_description\n")
        fh.write("\n".join(pages_lines) + "\n")

    depth2 = sum(1 for line in taxonomy_lines if line.split("\t")[0].count("/") == 2)
    print(f"top-level: {len(TOP_LEVEL)}")
    print(f"second-level topics: {depth2}")
    print(f"pages: {len(pages_lines)}")


if __name__ == "__main__":
    main()
