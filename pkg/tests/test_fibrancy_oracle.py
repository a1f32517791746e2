from lccdtt.fin_lcc import is_fibrant

import oracles


def test_oracle_on_documented_examples():
    assert oracles.brute_fibrant(oracles.chain2())
    assert not oracles.brute_fibrant(oracles.chain2(tm=False))
    assert not oracles.brute_fibrant(oracles.noncommuting_pb())
    assert oracles.brute_fibrant(oracles.walking_iso())
    assert not oracles.brute_fibrant(oracles.walking_iso(False))


def test_corpus_has_both_verdicts():
    cats = oracles.corpus(1, 10)
    verdicts = [is_fibrant(C).ok for _n, C in cats]
    assert any(verdicts) and not all(verdicts)
    for name, C in cats:
        assert is_fibrant(C).ok == oracles.brute_fibrant(C), name
