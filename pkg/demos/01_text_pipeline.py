"""Walk through the deterministic text layer.

Sentence segmentation with the abbreviation guard, punctuation-aware
tokenization, frequency-ordered vocabulary construction, and loading a
word-vector stream into an embedding table.
"""

import numpy as np

from brenda import build_vocabulary, embed, load_embeddings, segment_sentences, tokenize

TEXT = ("Dr. Alvarez presented the staffing report. The U.S. average is "
        "higher, e.g. in rural areas. Covid-19 numbers fell 4.5 percent! "
        "Will the trend hold?")

print("source text:\n ", TEXT, "\n")

sentences = segment_sentences(TEXT)
print("sentences (note: 'Dr.', 'U.S.' and 'e.g.' never split):")
for s in sentences:
    print(f"  [{s.index}] {s.text}")

print("\ntokens of sentence 2 (hyphens stay inside words, punctuation splits):")
tokens = tokenize(sentences[2].text)
print(" ", tokens)

corpus = [tokenize(s.text) for s in sentences]
vocab = build_vocabulary(corpus, min_count=1)
print(f"\nvocabulary: {len(vocab)} entries; most frequent first:")
print(" ", vocab.tokens[:10])

# A tiny word-vector stream in the standard "token v1 ... vd" format.
stream = [
    "covid-19 " + " ".join(["0.5"] * 8),
    "percent " + " ".join(["-0.25"] * 8),
]
table = load_embeddings(stream, vocab, d=8, seed=0)
print("\nembedding rows (from stream where present, seeded uniform otherwise):")
print("  covid-19 ->", table.row("covid-19")[:4], "...")
print("  trend    ->", np.round(table.row("trend")[:4], 4), "...")

matrix = embed(tokens, vocab, table)
print(f"\nembed({len(tokens)} tokens) -> matrix {matrix.shape}")
