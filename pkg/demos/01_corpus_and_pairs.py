#!/usr/bin/env python3
"""Walk through manifest loading, filtering, splits, and pair enumeration.

Builds a small in-memory manifest, applies the duration/frequency
retention rules, derives the unseen-word subset, and counts the three
kinds of pairs the toolkit works with.
"""

from awe.corpus import (build_test_prime, filter_instances, loads_manifest,
                        stats, validate_speaker_disjoint)
from awe.pairs import enumerate_eval_pairs, make_ae_pairs, make_cae_pairs

TRAIN = """instance_id,word,speaker_id,utterance_id,start_s,end_s,source
t01,water,spk1,u1,0.000,0.640,u1.wav
t02,water,spk1,u2,1.200,1.900,u2.wav
t03,water,spk2,u3,0.300,0.950,u3.wav
t04,river,spk1,u1,2.000,2.720,u1.wav
t05,river,spk2,u4,0.100,0.780,u4.wav
t06,blip,spk2,u4,1.000,1.350,u4.wav
"""

TEST = """instance_id,word,speaker_id,utterance_id,start_s,end_s,source
x01,water,spk7,u9,0.000,0.600,u9.wav
x02,stone,spk7,u9,1.000,1.700,u9.wav
x03,stone,spk8,u10,0.200,0.900,u10.wav
"""


def main():
    train = loads_manifest(TRAIN, split="train", language="en")
    test = loads_manifest(TEST, split="test", language="en")
    validate_speaker_disjoint(train, test)

    print("train stats:", stats(train))

    # the 0.35 s instance "blip" falls to the duration rule; with the toy
    # frequency band [2, 50] the singleton "river" words survive only if
    # they occur at least twice
    filtered = filter_instances(train, min_dur_s=0.5, min_freq=2, max_freq=50)
    print("after filtering:", sorted(i.instance_id for i in filtered))

    prime = build_test_prime(train, test)
    print("test' words (unseen in train):", sorted(prime.vocabulary))

    cae = make_cae_pairs(filtered, seed=0)
    ae = make_ae_pairs(filtered)
    ev = list(enumerate_eval_pairs(test))
    print(f"{len(cae)} correspondence pairs, {len(ae)} auto-encoder pairs, "
          f"{len(ev)} evaluation pairs")
    print("first correspondence pair:", cae[0])


if __name__ == "__main__":
    main()
