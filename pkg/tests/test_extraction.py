import pytest

from capsal.extraction import (
    Candidate,
    DisambiguationRequest,
    ExtractionResult,
    FirstSenseScorer,
    ResilientScorer,
    bootstrap_mappings,
    extract_caption,
    extract_noun_phrases,
    map_phrase,
    read_results,
    resolve,
    result_to_json,
    write_results,
)
from capsal.ingest import TaggedCaption, Token
from capsal.inventory import SynsetInventory, SynsetRole, Thresholds
from capsal.scorer_client import RemoteScorer, ScorerUnavailable

ROLE_TABLE = {
    "animal.n.01": SynsetRole.ROOT,
    "person.n.01": SynsetRole.ROOT,
    "food.n.01": SynsetRole.ROOT,
    "clothing.n.01": SynsetRole.ROOT,
    "electronic_equipment.n.01": SynsetRole.ROOT,
    "squirrel.n.01": SynsetRole.EXPLICIT,
    "snake.n.01": SynsetRole.EXPLICIT,
    "camera.n.01": SynsetRole.EXPLICIT,
    "shirt.n.01": SynsetRole.EXPLICIT,
    "baked_goods.n.01": SynsetRole.EXPLICIT,
    "couple.n.01": SynsetRole.EXPLICIT,
    "chordate.n.01": SynsetRole.IMPLICIT,
    "vertebrate.n.01": SynsetRole.IMPLICIT,
    "mammal.n.01": SynsetRole.IMPLICIT,
    "placental.n.01": SynsetRole.IMPLICIT,
    "rodent.n.01": SynsetRole.IMPLICIT,
}


def make_inventory(tree, table=None):
    entries = {tree.resolve(k): role for k, role in (table or ROLE_TABLE).items()}
    roots = frozenset(s for s, r in entries.items() if r is SynsetRole.ROOT)
    return SynsetInventory(entries, roots, Thresholds(3, 2))


def tagged(words, key="img1|en|0"):
    return TaggedCaption(
        record=None,
        caption_key=key,
        tokens=[Token(surface=w, upos=u) for w, u in words],
    )


@pytest.fixture()
def inventory(edited_tree):
    return make_inventory(edited_tree)


class RaisingScorer:
    def score(self, request):
        raise AssertionError("scorer must not be called")


class FixedScorer:
    def __init__(self, scores):
        self.scores = scores
        self.calls = 0

    def score(self, request):
        self.calls += 1
        return list(self.scores)


class TestNounPhrases:
    def test_maximal_runs(self):
        caption = tagged(
            [("a", "DET"), ("dog", "NOUN"), ("sees", "VERB"), ("the", "DET"),
             ("fire", "NOUN"), ("truck", "NOUN")]
        )
        phrases = extract_noun_phrases(caption)
        assert [p.span for p in phrases] == [(1, 1), (4, 5)]
        assert phrases[1].text == "fire truck"

    def test_no_nouns(self):
        caption = tagged([("running", "VERB"), ("fast", "ADV")])
        assert extract_noun_phrases(caption) == []

    def test_no_adjacent_phrases(self):
        # maximality: neighbouring spans are always separated by a non-noun
        caption = tagged(
            [("dog", "NOUN"), ("cat", "NOUN"), ("ran", "VERB"), ("far", "ADV"),
             ("fox", "PROPN"), ("den", "NOUN"), ("now", "ADV"), ("owl", "NOUN")]
        )
        spans = [p.span for p in extract_noun_phrases(caption)]
        assert spans == [(0, 1), (4, 5), (7, 7)]
        for (_, end), (start, _) in zip(spans, spans[1:]):
            assert start > end + 1

    def test_trailing_run_and_propn(self):
        caption = tagged(
            [("a", "DET"), ("woman", "NOUN"), ("standing", "VERB"), ("with", "ADP"),
             ("her", "PRON"), ("back", "NOUN"), ("to", "ADP"), ("the", "DET"),
             ("camera", "NOUN")]
        )
        texts = [p.text for p in extract_noun_phrases(caption)]
        assert "back" in texts and "camera" in texts and "woman" in texts


class TestMapPhrase:
    def test_squirrel_maps_to_itself(self, edited_tree, inventory):
        caption = tagged([("squirrel", "NOUN")])
        [phrase] = extract_noun_phrases(caption)
        candidates = map_phrase(edited_tree, inventory, phrase)
        assert [c.inventory_synset.lemma_key for c in candidates] == ["squirrel.n.01"]
        root = edited_tree.root_of(candidates[0].inventory_synset, inventory.roots)
        assert root.lemma_key == "animal.n.01"

    def test_out_of_inventory_phrase(self, edited_tree, inventory):
        caption = tagged([("object", "NOUN")])
        [phrase] = extract_noun_phrases(caption)
        assert map_phrase(edited_tree, inventory, phrase) == []

    def test_unknown_phrase(self, edited_tree, inventory):
        caption = tagged([("zzzz", "NOUN")])
        [phrase] = extract_noun_phrases(caption)
        assert map_phrase(edited_tree, inventory, phrase) == []

    def test_multiword_backoff_drops_leftmost(self, edited_tree, inventory):
        caption = tagged([("mountain", "NOUN"), ("squirrel", "NOUN")])
        [phrase] = extract_noun_phrases(caption)
        candidates = map_phrase(edited_tree, inventory, phrase)
        assert [c.inventory_synset.lemma_key for c in candidates] == ["squirrel.n.01"]

    def test_single_inventory_branch_needs_no_scorer(self, mini_tree):
        # "snake" has two senses, but only the animal branch is selected
        table = {k: r for k, r in ROLE_TABLE.items() if k != "person.n.01"}
        inventory = make_inventory(mini_tree, table)
        caption = tagged([("snake", "NOUN")])
        [phrase] = extract_noun_phrases(caption)
        candidates = map_phrase(mini_tree, inventory, phrase)
        assert [c.inventory_synset.lemma_key for c in candidates] == ["snake.n.01"]
        result = extract_caption(mini_tree, inventory, caption, RaisingScorer())
        assert [sid.lemma_key for _, sid in result.mentions] == ["snake.n.01"]

    def test_ambiguous_phrase_yields_two_candidates(self, mini_tree):
        inventory = make_inventory(mini_tree)
        caption = tagged([("snake", "NOUN")])
        [phrase] = extract_noun_phrases(caption)
        candidates = map_phrase(mini_tree, inventory, phrase)
        assert [c.inventory_synset.lemma_key for c in candidates] == [
            "snake.n.01",
            "person.n.01",
        ]
        assert candidates[0].representative == "snake"


class TestResolve:
    def request(self, mini_tree):
        inventory = make_inventory(mini_tree)
        caption = tagged([("the", "DET"), ("snake", "NOUN"), ("slept", "VERB")])
        [phrase] = extract_noun_phrases(caption)
        candidates = map_phrase(mini_tree, inventory, phrase)
        return DisambiguationRequest(
            caption_text=caption.text, span=(4, 9), candidates=tuple(candidates)
        )

    def test_argmax_wins(self, mini_tree):
        request = self.request(mini_tree)
        chosen = resolve(request, FixedScorer([-1.2, -0.4]))
        assert chosen.synset.lemma_key == "snake.n.02"

    def test_tie_goes_to_lowest_sense(self, mini_tree):
        request = self.request(mini_tree)
        chosen = resolve(request, FixedScorer([-0.5, -0.5]))
        assert chosen.synset.lemma_key == "snake.n.01"

    def test_fallback_prefers_first_sense(self, mini_tree):
        request = self.request(mini_tree)
        chosen = resolve(request, FirstSenseScorer())
        assert chosen.synset.lemma_key == "snake.n.01"

    def test_template_has_single_slot(self, mini_tree):
        request = self.request(mini_tree)
        assert request.template == "the {SLOT} slept"

    def test_misaligned_scores_rejected(self, mini_tree):
        request = self.request(mini_tree)
        with pytest.raises(ValueError):
            resolve(request, FixedScorer([-0.5]))


class TestExtractCaption:
    def test_squirrel_closure(self, edited_tree, inventory):
        caption = tagged([("a", "DET"), ("squirrel", "NOUN")])
        result = extract_caption(edited_tree, inventory, caption, FirstSenseScorer())
        assert {s.lemma_key for s in result.closure} == {
            "squirrel.n.01",
            "rodent.n.01",
            "placental.n.01",
            "mammal.n.01",
            "vertebrate.n.01",
            "chordate.n.01",
            "animal.n.01",
        }

    def test_empty_caption(self, edited_tree, inventory):
        caption = tagged([("running", "VERB")])
        result = extract_caption(edited_tree, inventory, caption, FirstSenseScorer())
        assert result.mentions == [] and result.closure == set()

    def test_five_caption_hand_trace(self, edited_tree, inventory):
        # expected mention lists were traced by hand on the fixture tree
        cases = [
            ([("a", "DET"), ("squirrel", "NOUN"), ("eats", "VERB"),
              ("baked", "NOUN"), ("goods", "NOUN")],
             [((1, 1), "squirrel.n.01"), ((3, 4), "baked_goods.n.01")]),
            ([("people", "NOUN"), ("wearing", "VERB"), ("shirts", "NOUN")],
             [((0, 0), "person.n.01"), ((2, 2), "shirt.n.01")]),
            ([("a", "DET"), ("couple", "NOUN"), ("holds", "VERB"), ("a", "DET"),
              ("camera", "NOUN")],
             [((1, 1), "couple.n.01"), ((4, 4), "camera.n.01")]),
            ([("the", "DET"), ("snake", "NOUN"), ("sleeps", "VERB")],
             [((1, 1), "snake.n.01")]),
            ([("green", "ADJ"), ("grass", "NOUN"), ("everywhere", "ADV")],
             []),
        ]
        for i, (words, expected) in enumerate(cases):
            caption = tagged(words, key=f"img1|en|{i}")
            result = extract_caption(edited_tree, inventory, caption, FirstSenseScorer())
            got = [(span, sid.lemma_key) for span, sid in result.mentions]
            assert got == expected, f"caption {i}"

    def test_closure_property(self, edited_tree, inventory):
        caption = tagged([("squirrel", "NOUN"), ("and", "CCONJ"), ("camera", "NOUN")])
        result = extract_caption(edited_tree, inventory, caption, FirstSenseScorer())
        inventory_ids = set(inventory.entries)
        for sid in result.closure:
            assert edited_tree.ancestors(sid) & inventory_ids <= result.closure

    def test_determinism(self, edited_tree, inventory):
        caption = tagged([("people", "NOUN"), ("and", "CCONJ"), ("snakes", "NOUN")])
        a = extract_caption(edited_tree, inventory, caption, FirstSenseScorer())
        b = extract_caption(edited_tree, inventory, caption, FirstSenseScorer())
        assert a.mentions == b.mentions and a.closure == b.closure

    def test_scorer_called_once_for_ambiguity(self, mini_tree):
        inventory = make_inventory(mini_tree)
        caption = tagged([("a", "DET"), ("snake", "NOUN")])
        scorer = FixedScorer([0.0, 1.0])
        result = extract_caption(mini_tree, inventory, caption, scorer)
        assert scorer.calls == 1
        assert [sid.lemma_key for _, sid in result.mentions] == ["person.n.01"]


class TestBootstrap:
    def test_first_sense_mapping(self, mini_tree):
        captions = [
            tagged([("snakes", "NOUN")], key="a|en|0"),
            tagged([("mountain", "NOUN"), ("squirrel", "NOUN")], key="a|en|1"),
        ]
        mappings = bootstrap_mappings(mini_tree, captions)
        assert [(p, s.lemma_key) for p, s in mappings] == [
            ("snakes", "snake.n.01"),
            ("mountain squirrel", "squirrel.n.01"),
        ]


class TestScorerPlumbing:
    def make_request(self, mini_tree):
        inventory = make_inventory(mini_tree)
        caption = tagged([("a", "DET"), ("snake", "NOUN")])
        [phrase] = extract_noun_phrases(caption)
        return DisambiguationRequest(
            caption_text=caption.text,
            span=(2, 7),
            candidates=tuple(map_phrase(mini_tree, inventory, phrase)),
        )

    def test_resilient_scorer_degrades(self, mini_tree):
        class Failing:
            def score(self, request):
                raise ScorerUnavailable("down")

        scorer = ResilientScorer(primary=Failing())
        request = self.make_request(mini_tree)
        scores = scorer.score(request)
        assert scores == FirstSenseScorer().score(request)
        assert scorer.degradations == 1

    def test_remote_scorer_parses_response(self, mini_tree):
        request = self.make_request(mini_tree)

        class FakeResponse:
            status_code = 200
            text = ""

            def json(self):
                return {"scores": [-1.5, -2.5], "model_id": "test"}

        class FakeSession:
            def __init__(self):
                self.posted = None

            def post(self, url, json=None, timeout=None):
                self.posted = (url, json)
                return FakeResponse()

        session = FakeSession()
        scorer = RemoteScorer("http://scorer.local", session=session)
        assert scorer.score(request) == [-1.5, -2.5]
        url, payload = session.posted
        assert url == "http://scorer.local/v1/score"
        assert payload == {"template": "a {SLOT}", "candidates": ["snake", "snake"]}

    def test_remote_scorer_http_error(self, mini_tree):
        request = self.make_request(mini_tree)

        class FakeSession:
            def post(self, url, json=None, timeout=None):
                class R:
                    status_code = 503
                    text = "loading"
                return R()

        with pytest.raises(ScorerUnavailable):
            RemoteScorer("http://scorer.local", session=FakeSession()).score(request)


class TestSerialization:
    def test_json_shape(self, edited_tree, inventory):
        caption = tagged([("a", "DET"), ("squirrel", "NOUN")])
        result = extract_caption(edited_tree, inventory, caption, FirstSenseScorer())
        line = result_to_json(result)
        assert line.startswith('{"caption_key":"img1|en|0","mentions":[["1:1",')
        assert '"closure":["animal.n.01"' in line

    def test_write_read_round_trip(self, edited_tree, inventory, tmp_path):
        captions = [
            tagged([("a", "DET"), ("squirrel", "NOUN")], key="b|en|0"),
            tagged([("people", "NOUN")], key="a|en|0"),
        ]
        results = [
            extract_caption(edited_tree, inventory, c, FirstSenseScorer())
            for c in captions
        ]
        path = tmp_path / "extraction.jsonl"
        write_results(results, path)
        loaded = read_results(path, edited_tree)
        # written sorted by caption key
        assert [r.caption_key for r in loaded] == ["a|en|0", "b|en|0"]
        by_key = {r.caption_key: r for r in results}
        for r in loaded:
            assert r.mentions == by_key[r.caption_key].mentions
            assert r.closure == by_key[r.caption_key].closure
