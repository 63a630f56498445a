#!/usr/bin/env python3
"""Regenerate the bundled toy corpora under fixtures/.

Both corpora are synthetic, written for offline end-to-end tests: each class
(or question family) shares distinctive vocabulary so the hashed bag-of-words
embedder places related samples near each other.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from maple.dataset import Sample, save_samples  # noqa: E402

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

SENTIMENT = {
    "positive": [
        "the film was wonderful and the acting was superb",
        "a delightful story with brilliant performances throughout",
        "i loved the soundtrack and the stunning photography",
        "an excellent movie with a wonderful heartfelt ending",
        "the cast was brilliant and the script sparkled with wit",
        "a superb adventure full of delightful surprises",
        "the direction was excellent and the pacing felt perfect",
        "i loved every minute of this wonderful charming film",
        "a brilliant screenplay delivered with stunning confidence",
        "the visuals were stunning and the finale was perfect",
        "an uplifting delightful picture with superb energy",
        "the perfect blend of humor and heart truly excellent",
        "a charming cast brings this wonderful tale to life",
        "the writing is sharp witty and consistently brilliant",
        "a stunning debut with an excellent emotional core",
        "heartfelt superb and wonderfully acted from start to finish",
        "the most delightful comedy of the year truly excellent",
        "a perfect evening at the cinema i loved it",
        "brilliant chemistry between the leads and a superb score",
        "wonderful from the opening scene to the stunning end",
    ],
    "negative": [
        "the film was terrible and the acting felt wooden",
        "a dreadful story with boring performances throughout",
        "i hated the soundtrack and the murky photography",
        "an awful movie with a terrible confusing ending",
        "the cast was boring and the script fell painfully flat",
        "a dreadful slog full of awful cliches",
        "the direction was awful and the pacing dragged badly",
        "i hated every minute of this terrible tedious film",
        "a dreadful screenplay delivered with zero conviction",
        "the visuals were murky and the finale was a mess",
        "a tedious awful picture with dreadful energy",
        "a clumsy blend of noise and cliche truly terrible",
        "a wooden cast drags this dreadful tale downward",
        "the writing is dull clumsy and consistently awful",
        "a murky debut with a terrible hollow core",
        "tedious dreadful and poorly acted from start to finish",
        "the most boring comedy of the year truly awful",
        "a wasted evening at the cinema i hated it",
        "zero chemistry between the leads and a dreadful score",
        "terrible from the opening scene to the murky end",
    ],
    "neutral": [
        "the film was okay and the acting was serviceable",
        "an ordinary story with average performances throughout",
        "the soundtrack was fine and the photography adequate",
        "a passable movie with an ordinary predictable ending",
        "the cast was adequate and the script stayed plain",
        "an average outing with a few passable moments",
        "the direction was fine and the pacing stayed steady",
        "an okay film neither memorable nor offensive",
        "a plain screenplay delivered with routine competence",
        "the visuals were adequate and the finale was fine",
        "an ordinary average picture with steady energy",
        "a routine blend of humor and drama simply okay",
        "a serviceable cast carries this plain tale along",
        "the writing is plain steady and consistently average",
        "an adequate debut with an ordinary quiet core",
        "routine passable and plainly acted from start to finish",
        "a middling comedy of the year simply okay",
        "an ordinary evening at the cinema it was fine",
        "mild chemistry between the leads and an average score",
        "okay from the opening scene to the plain end",
    ],
}

QA = {
    "arithmetic": [
        ("What is 2 plus 3? Options: (A) 4; (B) 5; (C) 6; (D) 7", "(B)"),
        ("What is 4 plus 4? Options: (A) 6; (B) 7; (C) 8; (D) 9", "(C)"),
        ("What is 9 minus 3? Options: (A) 5; (B) 6; (C) 7; (D) 8", "(B)"),
        ("What is 3 times 3? Options: (A) 6; (B) 8; (C) 9; (D) 12", "(C)"),
        ("What is 10 minus 4? Options: (A) 5; (B) 6; (C) 7; (D) 8", "(B)"),
        ("What is 5 plus 4? Options: (A) 8; (B) 9; (C) 10; (D) 11", "(B)"),
        ("What is 2 times 6? Options: (A) 10; (B) 11; (C) 12; (D) 14", "(C)"),
        ("What is 8 minus 5? Options: (A) 2; (B) 3; (C) 4; (D) 5", "(B)"),
        ("What is 7 plus 6? Options: (A) 12; (B) 13; (C) 14; (D) 15", "(B)"),
        ("What is 3 times 5? Options: (A) 12; (B) 14; (C) 15; (D) 18", "(C)"),
    ],
    "colors": [
        ("What color is a ripe banana? Options: (A) yellow; (B) blue; (C) red; (D) green", "(A)"),
        ("What color is fresh grass? Options: (A) purple; (B) green; (C) orange; (D) black", "(B)"),
        ("What color is the midday sky? Options: (A) brown; (B) pink; (C) blue; (D) gray", "(C)"),
        ("What color is a ripe tomato? Options: (A) red; (B) blue; (C) green; (D) white", "(A)"),
        ("What color is fresh snow? Options: (A) yellow; (B) white; (C) green; (D) red", "(B)"),
        ("What color is a clear night sky? Options: (A) white; (B) pink; (C) black; (D) yellow", "(C)"),
        ("What color is a ripe orange? Options: (A) orange; (B) blue; (C) purple; (D) gray", "(A)"),
        ("What color is wet mud? Options: (A) pink; (B) brown; (C) blue; (D) white", "(B)"),
        ("What color is a ripe eggplant? Options: (A) yellow; (B) orange; (C) purple; (D) green", "(C)"),
        ("What color is chalk on a blackboard? Options: (A) white; (B) red; (C) green; (D) blue", "(A)"),
    ],
    "capitals": [
        ("What is the capital of France? Options: (A) Paris; (B) Rome; (C) Berlin; (D) Madrid", "(A)"),
        ("What is the capital of Italy? Options: (A) Lisbon; (B) Rome; (C) Vienna; (D) Athens", "(B)"),
        ("What is the capital of Germany? Options: (A) Munich; (B) Hamburg; (C) Berlin; (D) Cologne", "(C)"),
        ("What is the capital of Spain? Options: (A) Madrid; (B) Seville; (C) Valencia; (D) Bilbao", "(A)"),
        ("What is the capital of Japan? Options: (A) Osaka; (B) Tokyo; (C) Kyoto; (D) Nagoya", "(B)"),
        ("What is the capital of Canada? Options: (A) Toronto; (B) Vancouver; (C) Ottawa; (D) Montreal", "(C)"),
        ("What is the capital of Egypt? Options: (A) Cairo; (B) Luxor; (C) Giza; (D) Aswan", "(A)"),
        ("What is the capital of Australia? Options: (A) Sydney; (B) Canberra; (C) Melbourne; (D) Perth", "(B)"),
        ("What is the capital of Brazil? Options: (A) Rio; (B) Salvador; (C) Brasilia; (D) Recife", "(C)"),
        ("What is the capital of Norway? Options: (A) Oslo; (B) Bergen; (C) Trondheim; (D) Stavanger", "(A)"),
    ],
    "animals": [
        ("Which animal barks? Options: (A) dog; (B) cat; (C) cow; (D) duck", "(A)"),
        ("Which animal purrs? Options: (A) horse; (B) cat; (C) sheep; (D) goat", "(B)"),
        ("Which animal moos? Options: (A) pig; (B) hen; (C) cow; (D) owl", "(C)"),
        ("Which animal quacks? Options: (A) duck; (B) crow; (C) frog; (D) bee", "(A)"),
        ("Which animal neighs? Options: (A) donkey; (B) horse; (C) mule; (D) camel", "(B)"),
        ("Which animal bleats? Options: (A) wolf; (B) bear; (C) sheep; (D) lion", "(C)"),
        ("Which animal roars? Options: (A) lion; (B) deer; (C) hare; (D) mole", "(A)"),
        ("Which animal hoots? Options: (A) swan; (B) owl; (C) gull; (D) wren", "(B)"),
        ("Which animal croaks? Options: (A) bat; (B) rat; (C) frog; (D) fox", "(C)"),
        ("Which animal hisses? Options: (A) snake; (B) dove; (C) lamb; (D) colt", "(A)"),
    ],
}


def split_groups(groups: dict, prefix: str, take: tuple[int, int, int]):
    """Per group: the first `take[0]` go to labeled, the next `take[1]` to
    unlabeled, the rest to test. Ids number the samples in group order."""
    labeled, unlabeled, test = [], [], []
    counter = 0
    for name, items in groups.items():
        for offset, item in enumerate(items):
            counter += 1
            text, label = item if isinstance(item, tuple) else (item, name)
            sample_id = f"{prefix}-{counter:03d}"
            if offset < take[0]:
                labeled.append(Sample(sample_id, text, label))
            elif offset < take[0] + take[1]:
                unlabeled.append(Sample(sample_id, text, None))
            else:
                test.append(Sample(sample_id, text, label))
    return labeled, unlabeled, test


def write_corpus(name: str, splits) -> None:
    out_dir = FIXTURES / name
    out_dir.mkdir(parents=True, exist_ok=True)
    for split_name, samples in zip(("labeled", "unlabeled", "test"), splits):
        save_samples(out_dir / f"{split_name}.jsonl", samples)
        print(f"{name}/{split_name}.jsonl: {len(samples)} samples")


def main() -> None:
    write_corpus("toy_sentiment", split_groups(SENTIMENT, "sent", (4, 10, 6)))
    write_corpus("toy_qa", split_groups(QA, "qa", (2, 5, 3)))


if __name__ == "__main__":
    main()
