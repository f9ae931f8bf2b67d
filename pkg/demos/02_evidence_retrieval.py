"""Turn a claim into filtered evidence snippets, fully offline.

Uses the bundled fixture corpus as the search backend: keyword-overlap
ranking stands in for a live search API, pages are extracted from HTML,
and sentences are kept when their cosine similarity to the claim exceeds
0.75 (adjacent survivors merge into one snippet).
"""

from pathlib import Path

from brenda.retrieval import FixtureSearchBackend, extract_article, filter_snippets
from brenda.textproc import Claim, EmbeddingTable, build_vocabulary, tokenize

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus"
CLAIM = Claim("Covid-19 can be cured by drinking bleach.")

backend = FixtureSearchBackend(CORPUS)
results = backend.search(CLAIM.text, k=10)
print(f"search returned {len(results)} pages for: {CLAIM.text!r}")
for r in results[:5]:
    print(f"  #{r.rank} {r.url}")

articles = []
for result in results:
    article = extract_article(result)
    articles.append(article)
print(f"\nextracted {len(articles)} articles; first one:")
first = articles[0]
print(f"  title: {first.title}")
print(f"  domain: {first.domain}, date: {first.publication_date}, "
      f"authors: {first.authors}")
print(f"  {len(first.sentences)} sentences")

# Embedding table over everything we just read.
corpus_tokens = [tokenize(s.text) for a in articles for s in a.sentences]
corpus_tokens.append(list(CLAIM.tokens))
table = EmbeddingTable.random(build_vocabulary(corpus_tokens, 1), 16, seed=11)

print("\nsnippets above the 0.75 similarity threshold:")
for article in articles:
    for snippet in filter_snippets(CLAIM, article, 0.75, table=table):
        print(f"  {article.url} [{snippet.start}-{snippet.end}] "
              f"sim={snippet.similarity:.3f}")
        print(f"    {snippet.text}")
