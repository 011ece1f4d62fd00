#!/usr/bin/env python3
"""Generate the bundled demo corpus in SIS format.

Emits, into the output directory (default ./data):
  sis.tsv               corpus table (sentence_id, verb, group, text, reversed_text, r1..r7)
  sis.conllu            gold dependency parses, one sentence per record
  annotations.tsv       entity/animacy tags per token (sentence_id, token_index, tag)
  ngrams.tsv            "lemma verb" bigram frequency table
  gold_features.tsv     reference feature values per sentence (dual implementation
                        of the extraction rules, used by the agreement audit)
  embeddings_static.txt static word vectors (headerless text format)
  contextual.tsv        sentence vectors from the stand-in contextual encoder
  verb_scores.tsv       external verb-level symmetry scores for the replication check

Everything is seeded; re-running reproduces the bundle byte for byte.
--check additionally runs a numpy leave-one-predicate-out evaluation of the
ridge families so the bundle's difficulty can be inspected without the toolkit.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

SYMMETRIC = [
    "marry", "match", "resemble", "meet", "argue", "differ", "combine",
    "compare", "rhyme", "tie", "chat", "alternate", "mix", "coexist",
    "clash", "converse", "collaborate", "communicate", "agree", "separate",
]
ASYMMETRIC = [
    "love", "drown", "see", "hit", "follow", "choke", "eat", "copy", "save",
    "hate", "kill", "chase", "hurt", "push", "bounce", "break", "lecture",
    "hurry", "applaud", "know",
]

# base -> (past, 3sg present, past participle)
CONJ = {
    "marry": ("married", "marries", "married"),
    "match": ("matched", "matches", "matched"),
    "resemble": ("resembled", "resembles", "resembled"),
    "meet": ("met", "meets", "met"),
    "argue": ("argued", "argues", "argued"),
    "differ": ("differed", "differs", "differed"),
    "combine": ("combined", "combines", "combined"),
    "compare": ("compared", "compares", "compared"),
    "rhyme": ("rhymed", "rhymes", "rhymed"),
    "tie": ("tied", "ties", "tied"),
    "chat": ("chatted", "chats", "chatted"),
    "alternate": ("alternated", "alternates", "alternated"),
    "mix": ("mixed", "mixes", "mixed"),
    "coexist": ("coexisted", "coexists", "coexisted"),
    "clash": ("clashed", "clashes", "clashed"),
    "converse": ("conversed", "converses", "conversed"),
    "collaborate": ("collaborated", "collaborates", "collaborated"),
    "communicate": ("communicated", "communicates", "communicated"),
    "agree": ("agreed", "agrees", "agreed"),
    "separate": ("separated", "separates", "separated"),
    "love": ("loved", "loves", "loved"),
    "drown": ("drowned", "drowns", "drowned"),
    "see": ("saw", "sees", "seen"),
    "hit": ("hit", "hits", "hit"),
    "follow": ("followed", "follows", "followed"),
    "choke": ("choked", "chokes", "choked"),
    "eat": ("ate", "eats", "eaten"),
    "copy": ("copied", "copies", "copied"),
    "save": ("saved", "saves", "saved"),
    "hate": ("hated", "hates", "hated"),
    "kill": ("killed", "kills", "killed"),
    "chase": ("chased", "chases", "chased"),
    "hurt": ("hurt", "hurts", "hurt"),
    "push": ("pushed", "pushes", "pushed"),
    "bounce": ("bounced", "bounces", "bounced"),
    "break": ("broke", "breaks", "broken"),
    "lecture": ("lectured", "lectures", "lectured"),
    "hurry": ("hurried", "hurries", "hurried"),
    "applaud": ("applauded", "applauds", "applauded"),
    "know": ("knew", "knows", "known"),
}

# preposition used in the oblique frames, per verb
PREP = {
    "argue": "with", "chat": "with", "converse": "with", "collaborate": "with",
    "communicate": "with", "agree": "with", "clash": "with", "coexist": "with",
    "differ": "from", "alternate": "with", "combine": "with", "compare": "with",
    "mix": "with", "rhyme": "with", "tie": "with", "match": "with",
    "marry": None, "resemble": None, "meet": "with", "separate": "from",
    "love": None, "drown": None, "see": None, "hit": None, "follow": None,
    "choke": None, "eat": None, "copy": None, "save": None, "hate": None,
    "kill": None, "chase": "after", "hurt": None, "push": "against", "bounce": "off",
    "break": None, "lecture": "to", "hurry": "after", "applaud": None, "know": "about",
}

# can the verb take a bare direct object / a bare conjoined-subject intransitive
TRANS_OK = {v: True for v in SYMMETRIC + ASYMMETRIC}
for v in ["differ", "coexist", "chat", "converse", "collaborate", "communicate",
          "agree", "clash", "argue", "alternate", "rhyme"]:
    TRANS_OK[v] = False
CONJ_INTR_OK = {v: True for v in SYMMETRIC}
CONJ_INTR_OK.update({v: False for v in ASYMMETRIC})
for v in ["resemble", "compare"]:
    CONJ_INTR_OK[v] = False
for v in ["drown", "hurry", "bounce"]:
    CONJ_INTR_OK[v] = True



def tok(form, lemma, upos, feats, head, deprel):
    return {"form": form, "lemma": lemma, "upos": upos, "feats": dict(feats),
            "head": head, "deprel": deprel}


class NP:
    """A noun phrase chunk: tokens (with intra-NP relations), head info, tags."""

    def __init__(self, tokens, head_idx, number, anim, head_lemma, obj_form=None):
        self.tokens = tokens
        self.head_idx = head_idx
        self.number = number
        self.anim = anim          # PERSON ORGANIZATION ANIMATE LOCATION NONE PRON PRON_INAN
        self.head_lemma = head_lemma
        self.obj_form = obj_form  # accusative surface form for pronouns


def np_pron(form, number, person, inanimate=False):
    acc = {"I": "me", "we": "us", "they": "them", "she": "her", "he": "him", "it": "it"}
    lemma = form if form == "I" else form.lower()
    feats = {"Number": number, "Person": person, "PronType": "Prs", "Case": "Nom"}
    t = [("PRON", form, lemma, feats, "head")]
    return NP(t, 0, number, "PRON_INAN" if inanimate else "PRON", lemma,
              obj_form=acc.get(form, form))


def np_name(form):
    t = [("PROPN", form, form, {"Number": "Sing"}, "head")]
    return NP(t, 0, "Sing", "PERSON", form.lower())


def np_the(noun, lemma, number, anim):
    t = [("DET", "the", "the", {"Definite": "Def", "PronType": "Art"}, "det"),
         ("NOUN", noun, lemma, {"Number": number}, "head")]
    return NP(t, 1, number, anim, lemma)


def np_poss(poss, noun, lemma, number, anim):
    pf = {"my": ("I", {"Number": "Sing", "Person": "1", "Poss": "Yes", "PronType": "Prs"}),
          "her": ("she", {"Number": "Sing", "Person": "3", "Poss": "Yes", "PronType": "Prs"}),
          "his": ("he", {"Number": "Sing", "Person": "3", "Poss": "Yes", "PronType": "Prs"})}
    plemma, pfeats = pf[poss]
    t = [("PRON", poss, plemma, pfeats, "nmod:poss"),
         ("NOUN", noun, lemma, {"Number": number}, "head")]
    return NP(t, 1, number, anim, lemma)


def np_of(noun, lemma, number, anim, pnoun, plemma, pnumber):
    """'the N of the PN' — head noun with an of-phrase modifier."""
    t = [("DET", "the", "the", {"Definite": "Def", "PronType": "Art"}, "det"),
         ("NOUN", noun, lemma, {"Number": number}, "head"),
         ("ADP", "of", "of", {}, "case:nmod"),
         ("DET", "the", "the", {"Definite": "Def", "PronType": "Art"}, "det:nmod"),
         ("NOUN", pnoun, plemma, {"Number": pnumber}, "nmod")]
    return NP(t, 1, number, anim, lemma)


# ---------------------------------------------------------------------------
# filler pools

def build_pools():
    names = ["John", "Mary", "Anna", "Gab", "Tom", "Sarah", "Peter", "Alice",
             "Emma", "David", "Lucy", "Mark", "Nina", "Paul", "Rosa", "Ben"]
    humans_s = ([np_name(n) for n in names] +
                [np_pron("I", "Sing", "1"), np_pron("she", "Sing", "3"),
                 np_pron("he", "Sing", "3")] +
                [np_the(n, n, "Sing", "ANIMATE") for n in
                 ["teacher", "doctor", "nurse", "lawyer", "farmer", "singer",
                  "soldier", "driver", "manager", "patient", "student", "coach"]] +
                [np_poss("my", "friend", "friend", "Sing", "ANIMATE"),
                 np_poss("my", "brother", "brother", "Sing", "ANIMATE"),
                 np_poss("her", "sister", "sister", "Sing", "ANIMATE"),
                 np_poss("his", "neighbor", "neighbor", "Sing", "ANIMATE"),
                 np_of("captain", "captain", "Sing", "ANIMATE", "team", "team", "Sing"),
                 np_of("coach", "coach", "Sing", "ANIMATE", "club", "club", "Sing"),
                 np_of("leader", "leader", "Sing", "ANIMATE", "union", "union", "Sing"),
                 np_of("owner", "owner", "Sing", "ANIMATE", "shop", "shop", "Sing")])
    humans_p = ([np_pron("we", "Plur", "1"), np_pron("they", "Plur", "3")] +
                [np_the(f, l, "Plur", "ANIMATE") for f, l in
                 [("children", "child"), ("players", "player"),
                  ("neighbors", "neighbor"), ("students", "student"),
                  ("workers", "worker"), ("dancers", "dancer"),
                  ("guards", "guard"), ("visitors", "visitor")]] +
                [np_poss("my", "friends", "friend", "Plur", "ANIMATE")])
    orgs = [np_the(n, n, "Sing", "ORGANIZATION") for n in
            ["committee", "company", "band", "council", "union", "club", "team"]]
    animals_s = [np_the(n, n, "Sing", "ANIMATE") for n in
                 ["dog", "cat", "horse", "fox", "goat"]]
    animals_p = [np_the(f, l, "Plur", "ANIMATE") for f, l in
                 [("birds", "bird"), ("dogs", "dog"), ("wolves", "wolf"),
                  ("sheep", "sheep")]]
    things_s = ([np_the(n, n, "Sing", "NONE") for n in
                 ["car", "wall", "rope", "report", "song", "story", "engine",
                  "box", "letter", "machine", "boat", "program", "ball", "vase",
                  "window", "melody", "pattern", "cart", "door", "poem"]] +
                [np_of("roof", "roof", "Sing", "NONE", "house", "house", "Sing"),
                 np_of("title", "title", "Sing", "NONE", "book", "book", "Sing"),
                 np_of("sound", "sound", "Sing", "NONE", "bell", "bell", "Sing")])
    things_p = ([np_the(n + "s", n, "Plur", "NONE") for n in
                 ["color", "song", "number", "flavor", "wire",
                  "chemical", "shape", "pattern", "liquid", "signal", "poem",
                  "metal", "team"]] +
                [np_the("stories", "story", "Plur", "NONE")])
    foods = [np_the(n, n, "Sing", "NONE") for n in
             ["bread", "soup", "rice", "cake", "stew"]] + \
            [np_the("apples", "apple", "Plur", "NONE")]
    locs = [np_the(n, n, "Sing", "LOCATION") for n in
            ["city", "village", "harbor", "valley"]]
    return {"humans_s": humans_s, "humans_p": humans_p, "orgs": orgs,
            "animals_s": animals_s, "animals_p": animals_p,
            "things_s": things_s, "things_p": things_p,
            "foods": foods, "locs": locs}


# per-verb filler classes: (subject classes, object classes)
def verb_args(verb):
    human = ["humans_s", "humans_p", "orgs"]
    any_anim = human + ["animals_s", "animals_p"]
    thing = ["things_s", "things_p"]
    table = {
        "marry": (human, ["humans_s"]), "meet": (human, human + ["orgs"]),
        "chat": (human, human), "converse": (human, human),
        "argue": (human, human), "agree": (human, human + ["orgs"]),
        "collaborate": (human, human + ["orgs"]),
        "communicate": (human, human + ["orgs"]),
        "match": (thing + human, thing), "resemble": (any_anim + thing, any_anim + thing),
        "differ": (thing + human, thing + human),
        "combine": (thing + human, thing), "compare": (human + thing, thing),
        "rhyme": (thing, thing), "tie": (human + thing, thing + ["humans_s"]),
        "alternate": (thing + human, thing),
        "mix": (thing + human, thing), "coexist": (any_anim + thing, any_anim + thing),
        "clash": (thing + human, thing + human),
        "separate": (human, human + thing),
        "love": (any_anim, any_anim + thing + ["locs"]),
        "drown": (any_anim, any_anim),
        "see": (any_anim, any_anim + thing + ["locs"]),
        "hit": (any_anim, any_anim + thing),
        "follow": (any_anim, any_anim + ["locs"]),
        "choke": (any_anim, any_anim), "eat": (any_anim, ["foods", "animals_s"]),
        "copy": (human, thing + ["humans_s"]), "save": (human, any_anim + thing),
        "hate": (any_anim, any_anim + thing), "kill": (any_anim, any_anim),
        "chase": (any_anim, any_anim), "hurt": (any_anim, any_anim),
        "push": (human, any_anim + thing), "bounce": (human, ["things_s"]),
        "break": (human, thing), "lecture": (human, human),
        "hurry": (human, human), "applaud": (human, human + ["orgs"]),
        "know": (any_anim, any_anim + ["locs"]),
    }
    return table[verb]


MODALS = ["could", "can", "might", "would", "should"]
MODAL_FEATS = {"could": {"Tense": "Past", "VerbForm": "Fin"},
               "can": {"Tense": "Pres", "VerbForm": "Fin"},
               "might": {"VerbForm": "Fin"},
               "would": {"VerbForm": "Fin"},
               "should": {"VerbForm": "Fin"}}
ADVERBS = ["yesterday", "quietly", "often", "finally", "again", "slowly",
           "loudly", "eagerly", "rarely", "twice"]

# ---------------------------------------------------------------------------
# sentence assembly


class Sentence:
    def __init__(self, sid, verb, frame):
        self.sid = sid
        self.verb = verb
        self.frame = frame
        self.tokens = []          # final token dicts, 1-based heads
        self.target = None        # 1-based index of the target verb token
        self.ann = []             # (token_index, tag)
        self.ent_spans = []       # [(start, end, NP)] 1-based inclusive, for reversal
        self.text = ""
        self.reversed_text = ""


def place_np(out, np_obj, head_of_np, rel_of_np, ann, case_tok=None):
    """Append NP tokens; returns 1-based index of the NP head token."""
    base = len(out) + (2 if case_tok is not None else 1)
    head_idx = base + np_obj.head_idx
    nmod_local = next((i for i, t in enumerate(np_obj.tokens) if t[4] == "nmod"), None)
    if case_tok is not None:
        form, lemma = case_tok
        out.append(tok(form, lemma, "ADP", {}, head_idx, "case"))
    for i, (upos, form, lemma, feats, rel) in enumerate(np_obj.tokens):
        if rel == "head":
            out.append(tok(form, lemma, upos, feats, head_of_np, rel_of_np))
        elif rel in ("case:nmod", "det:nmod"):
            out.append(tok(form, lemma, upos, feats, base + nmod_local, rel.split(":")[0]))
        else:
            out.append(tok(form, lemma, upos, feats, head_idx, rel))
    tag = {"PRON": None, "PRON_INAN": "INANIMATE", "NONE": None}.get(np_obj.anim, np_obj.anim)
    if tag is not None:
        ann.append((head_idx, tag))
    return head_idx


def verb_feats(tense, number=None, voice=None):
    f = {"VerbForm": "Fin"}
    if tense == "past":
        f["Tense"] = "Past"
    elif tense == "pres":
        f["Tense"] = "Pres"
        if number == "Sing":
            f.update({"Number": "Sing", "Person": "3"})
    elif tense == "part":
        f = {"Tense": "Past", "VerbForm": "Part"}
        if voice == "pass":
            f["Voice"] = "Pass"
    elif tense == "inf":
        f = {"VerbForm": "Inf"}
    return f


def vform(verb, tense, number="Plur"):
    past, third, part = CONJ[verb]
    if tense == "past":
        return past
    if tense == "pres":
        return third if number == "Sing" else verb
    if tense == "part":
        return part
    return verb


def finish(sent, tokens):
    first = tokens[0]["form"]
    if first[0].islower():
        tokens[0]["form"] = first[0].upper() + first[1:]
    for i, t in enumerate(tokens):
        t["id"] = i + 1
    sent.tokens = tokens
    text = ""
    for t in tokens:
        w = t["form"]
        if w in {".", ",", "n't"}:
            text += w
        else:
            text += (" " if text else "") + w
    sent.text = text


def np_surface(np_obj, accusative=False):
    forms = [f for _, f, _, _, _ in np_obj.tokens]
    if accusative and np_obj.obj_form is not None:
        forms = [np_obj.obj_form]
    return " ".join(forms)


def cap_first(s):
    return s[0].upper() + s[1:] if s else s


def lower_first(s):
    # keep proper names and "I" capitalized
    head = s.split(" ")[0]
    if head in {"I"} or (head[0].isupper() and head.lower() not in
                         {"the", "my", "her", "his", "a", "an"}):
        return s
    return s[0].lower() + s[1:]


def frame_trans(sent, verb, subj, obj, tense, rng, modal=None, neg=False,
                embed=False, adv=None):
    """S V O variants: plain, modal, negated, or embedded under 'I think'."""
    out = []
    ann = sent.ann
    root_off = 0
    if embed:
        out.append(tok("I", "I", "PRON",
                       {"Case": "Nom", "Number": "Sing", "Person": "1", "PronType": "Prs"},
                       2, "nsubj"))
        out.append(tok("think", "think", "VERB", verb_feats("pres"), 0, "root"))
        root_off = 2
    pre_v = []
    if modal:
        pre_v.append(tok(modal, modal, "AUX", MODAL_FEATS[modal], 0, "aux"))
    if neg:
        pre_v.append(tok("did", "do", "AUX", {"Mood": "Ind", "Tense": "Past", "VerbForm": "Fin"}, 0, "aux"))
        pre_v.append(tok("not", "not", "PART", {"Polarity": "Neg"}, 0, "advmod"))
    v_idx = root_off + len(subj.tokens) + len(pre_v) + 1
    place_np(out, subj, v_idx, "nsubj", ann)
    sent.ent_spans.append((root_off + 1, len(out), subj))
    for t in pre_v:
        t["head"] = v_idx
        out.append(t)
    vt = "inf" if (modal or neg) else tense
    vnum = subj.number
    out.append(tok(vform(verb, vt, vnum), verb, "VERB", verb_feats(vt, vnum),
                   2 if embed else 0, "ccomp" if embed else "root"))
    sent.target = v_idx
    ob_start = len(out) + 1
    o_head = place_np(out, obj, v_idx, "obj", ann)
    sent.ent_spans.append((ob_start, len(out), obj))
    if adv:
        out.append(tok(adv, adv, "ADV", {}, v_idx, "advmod"))
    out.append(tok(".", ".", "PUNCT", {}, 2 if embed else v_idx, "punct"))
    finish(sent, out)
    subj_s = np_surface(subj)
    obj_s = np_surface(obj, accusative=True)
    rev_subj = cap_first(np_surface(obj))
    rev_obj = np_surface(subj, accusative=True)
    mid = ""
    if modal:
        mid = f"{modal} {vform(verb,'inf')}"
    elif neg:
        mid = f"did not {vform(verb,'inf')}"
    else:
        mid = vform(verb, vt, obj.number)  # reversed subject is old object
    tail = f" {adv}" if adv else ""
    if embed:
        sent.reversed_text = f"I think {rev_subj} {mid} {lower_first(rev_obj)}{tail}."
    else:
        sent.reversed_text = f"{rev_subj} {mid} {lower_first(rev_obj)}{tail}."


def frame_with(sent, verb, subj, obl, tense, rng, modal=None):
    out = []
    ann = sent.ann
    prep = PREP[verb]
    pre_v = []
    if modal:
        pre_v.append(tok(modal, modal, "AUX", MODAL_FEATS[modal], 0, "aux"))
    v_idx = len(subj.tokens) + len(pre_v) + 1
    place_np(out, subj, v_idx, "nsubj", ann)
    sent.ent_spans.append((1, len(out), subj))
    for t in pre_v:
        t["head"] = v_idx
        out.append(t)
    vt = "inf" if modal else tense
    out.append(tok(vform(verb, vt, subj.number), verb, "VERB",
                   verb_feats(vt, subj.number), 0, "root"))
    sent.target = v_idx
    ob_start = len(out) + 2  # past the case token
    place_np(out, obl, v_idx, "obl", ann, case_tok=(prep, prep))
    sent.ent_spans.append((ob_start, len(out), obl))
    out.append(tok(".", ".", "PUNCT", {}, v_idx, "punct"))
    finish(sent, out)
    rev_subj = cap_first(np_surface(obl))
    rev_obl = np_surface(subj, accusative=True)
    mid = f"{modal} {vform(verb,'inf')}" if modal else vform(verb, vt, obl.number)
    sent.reversed_text = f"{rev_subj} {mid} {prep} {lower_first(rev_obl)}."


def frame_conj(sent, verb, np1, np2, tense, rng, rcp=False, modal=None,
               neg=False, adv=None, embed=False):
    """NP1 and NP2 V [each other] — conjoined subject."""
    out = []
    ann = sent.ann
    root_off = 0
    if embed:
        out.append(tok("I", "I", "PRON",
                       {"Case": "Nom", "Number": "Sing", "Person": "1", "PronType": "Prs"},
                       2, "nsubj"))
        out.append(tok("think", "think", "VERB", verb_feats("pres"), 0, "root"))
        root_off = 2
    n1_head_off = root_off + np1.head_idx + 1
    place_np(out, np1, 0, "nsubj", ann)  # head fixed later
    n1_span = (root_off + 1, len(out))
    n1_head = n1_head_off
    out.append(tok("and", "and", "CCONJ", {}, 0, "cc"))
    cc_idx = len(out)
    n2_start = len(out) + 1
    n2_head = place_np(out, np2, n1_head, "conj", ann)
    out[cc_idx - 1]["head"] = n2_head
    n2_span = (n2_start, len(out))
    pre_v = []
    if modal:
        pre_v.append(tok(modal, modal, "AUX", MODAL_FEATS[modal], 0, "aux"))
    if neg:
        pre_v.append(tok("did", "do", "AUX", {"Mood": "Ind", "Tense": "Past", "VerbForm": "Fin"}, 0, "aux"))
        pre_v.append(tok("not", "not", "PART", {"Polarity": "Neg"}, 0, "advmod"))
    for t in pre_v:
        out.append(t)
    v_idx = len(out) + 1
    for t in pre_v:
        t["head"] = v_idx
    vt = "inf" if (modal or neg) else tense
    out.append(tok(vform(verb, vt, "Plur"), verb, "VERB", verb_feats(vt, "Plur"),
                   2 if embed else 0, "ccomp" if embed else "root"))
    sent.target = v_idx
    for t in out[n1_span[0] - 1:n1_span[1]]:
        if t["deprel"] == "nsubj":
            t["head"] = v_idx
    if rcp:
        out.append(tok("each", "each", "DET", {}, v_idx + 2, "det"))
        out.append(tok("other", "other", "PRON", {"PronType": "Rcp"}, v_idx, "obj"))
    if adv:
        out.append(tok(adv, adv, "ADV", {}, v_idx, "advmod"))
    out.append(tok(".", ".", "PUNCT", {}, 2 if embed else v_idx, "punct"))
    sent.ent_spans.append((n1_span[0], n1_span[1], np1))
    sent.ent_spans.append((n2_span[0], n2_span[1], np2))
    finish(sent, out)
    mid = vform(verb, vt, "Plur")
    if modal:
        mid = f"{modal} {vform(verb,'inf')}"
    if neg:
        mid = f"did not {vform(verb,'inf')}"
    tail = " each other" if rcp else ""
    tail += f" {adv}" if adv else ""
    if embed:
        sent.reversed_text = (f"I think {np_surface(np2)} and "
                              f"{lower_first(np_surface(np1))} {mid}{tail}.")
    else:
        sent.reversed_text = (f"{cap_first(np_surface(np2))} and {lower_first(np_surface(np1))} "
                              f"{mid}{tail}.")


def frame_conj_trans(sent, verb, np1, np2, obj, tense, rng, prep=None):
    """NP1 and NP2 V O  (or: V prep O) — joint subject acting on an object."""
    out = []
    ann = sent.ann
    n1_head = np1.head_idx + 1
    place_np(out, np1, 0, "nsubj", ann)
    n1_span = (1, len(out))
    out.append(tok("and", "and", "CCONJ", {}, 0, "cc"))
    cc_idx = len(out)
    n2_start = len(out) + 1
    n2_head = place_np(out, np2, n1_head, "conj", ann)
    out[cc_idx - 1]["head"] = n2_head
    n2_span = (n2_start, len(out))
    v_idx = len(out) + 1
    out.append(tok(vform(verb, tense, "Plur"), verb, "VERB", verb_feats(tense, "Plur"), 0, "root"))
    sent.target = v_idx
    for t in out[:n1_span[1]]:
        if t["deprel"] == "nsubj":
            t["head"] = v_idx
    o_start = len(out) + (2 if prep else 1)
    if prep:
        place_np(out, obj, v_idx, "obl", ann, case_tok=(prep, prep))
    else:
        place_np(out, obj, v_idx, "obj", ann)
    o_span = (o_start, len(out))
    out.append(tok(".", ".", "PUNCT", {}, v_idx, "punct"))
    sent.ent_spans.append((n1_span[0], n1_span[1], np1))
    sent.ent_spans.append((n2_span[0], n2_span[1], np2))
    sent.ent_spans.append((o_span[0], o_span[1], obj))
    finish(sent, out)
    mid = vform(verb, tense, obj.number)
    pp = f"{prep} " if prep else ""
    sent.reversed_text = (f"{cap_first(np_surface(obj))} {mid} {pp}"
                          f"{lower_first(np_surface(np1, accusative=True))} and "
                          f"{lower_first(np_surface(np2, accusative=True))}.")


def frame_plur_rcp(sent, verb, subj, tense, rng, one_another=False):
    out = []
    ann = sent.ann
    v_idx = len(subj.tokens) + 1
    place_np(out, subj, v_idx, "nsubj", ann)
    sent.ent_spans.append((1, len(out), subj))
    out.append(tok(vform(verb, tense, "Plur"), verb, "VERB", verb_feats(tense, "Plur"), 0, "root"))
    sent.target = v_idx
    if one_another:
        out.append(tok("one", "one", "DET", {}, v_idx + 2, "det"))
        out.append(tok("another", "another", "PRON", {"PronType": "Rcp"}, v_idx, "obj"))
    else:
        out.append(tok("each", "each", "DET", {}, v_idx + 2, "det"))
        out.append(tok("other", "other", "PRON", {"PronType": "Rcp"}, v_idx, "obj"))
    out.append(tok(".", ".", "PUNCT", {}, v_idx, "punct"))
    finish(sent, out)
    sent.reversed_text = sent.text


def frame_passive(sent, verb, subj, agent, rng):
    """O was V-en by S (subj here = surface subject, agent = by-phrase)."""
    out = []
    ann = sent.ann
    aux_form = "was" if subj.number == "Sing" else "were"
    v_idx = len(subj.tokens) + 2
    place_np(out, subj, v_idx, "nsubj:pass", ann)
    sent.ent_spans.append((1, len(out), subj))
    out.append(tok(aux_form, "be", "AUX",
                   {"Mood": "Ind", "Number": subj.number, "Tense": "Past", "VerbForm": "Fin"},
                   v_idx, "aux:pass"))
    out.append(tok(vform(verb, "part"), verb, "VERB", verb_feats("part", voice="pass"), 0, "root"))
    sent.target = v_idx
    ag_start = len(out) + 2
    place_np(out, agent, v_idx, "obl", ann, case_tok=("by", "by"))
    sent.ent_spans.append((ag_start, len(out), agent))
    out.append(tok(".", ".", "PUNCT", {}, v_idx, "punct"))
    finish(sent, out)
    rev_aux = "was" if agent.number == "Sing" else "were"
    sent.reversed_text = (f"{cap_first(np_surface(agent))} {rev_aux} {vform(verb,'part')} "
                          f"by {lower_first(np_surface(subj, accusative=True))}.")


def frame_bicoord(sent, verb, s1, o1, rng, adv="too"):
    """S1 V O1 and S2 V O2 too — explicit two-clause reciprocal."""
    out = []
    ann = sent.ann
    v1_idx = len(s1.tokens) + 1
    place_np(out, s1, v1_idx, "nsubj", ann)
    sent.ent_spans.append((1, len(out), s1))
    out.append(tok(vform(verb, "past"), verb, "VERB", verb_feats("past"), 0, "root"))
    sent.target = v1_idx
    o_start = len(out) + 1
    place_np(out, o1, v1_idx, "obj", ann)
    sent.ent_spans.append((o_start, len(out), o1))
    cc_idx = len(out) + 1
    out.append(tok("and", "and", "CCONJ", {}, 0, "cc"))
    # pronominal copies of the two entities with roles switched
    s2 = pron_copy(o1)
    o2 = pron_copy(s1, accusative=True)
    v2_idx = cc_idx + len(s2.tokens) + 1
    out[cc_idx - 1]["head"] = v2_idx
    place_np(out, s2, v2_idx, "nsubj", ann)
    out.append(tok(vform(verb, "past"), verb, "VERB", verb_feats("past"), v1_idx, "conj"))
    place_np(out, o2, v2_idx, "obj", ann)
    if adv:
        out.append(tok(adv, adv, "ADV", {}, v2_idx, "advmod"))
    out.append(tok(".", ".", "PUNCT", {}, v1_idx, "punct"))
    finish(sent, out)
    rev_s = cap_first(np_surface(o1))
    rev_o = np_surface(s1, accusative=True)
    rs2 = np_surface(pron_copy(s1))
    ro2 = np_surface(pron_copy(o1, accusative=True), accusative=True)
    sent.reversed_text = (f"{rev_s} {vform(verb,'past')} {lower_first(rev_o)} and "
                          f"{rs2.lower() if rs2 != 'I' else rs2} {vform(verb,'past')} {ro2}"
                          f"{' ' + adv if adv else ''}.")


ANIMAL_LEMMAS = {"dog", "cat", "horse", "fox", "goat", "bird", "wolf", "sheep"}


def pron_copy(np_obj, accusative=False):
    """Pronoun standing for an NP in a follow-up clause."""
    if np_obj.anim in ("PRON", "PRON_INAN"):
        return np_obj
    inan = np_obj.anim in ("NONE", "LOCATION")
    if np_obj.number == "Plur":
        return np_pron("they", "Plur", "3", inanimate=inan)
    if np_obj.anim in ("PERSON", "ANIMATE") and np_obj.head_lemma not in ANIMAL_LEMMAS:
        fem = np_obj.head_lemma in {"mary", "anna", "sarah", "alice", "emma", "lucy",
                                    "nina", "rosa", "sister", "nurse"}
        return np_pron("she" if fem else "he", "Sing", "3")
    return np_pron("it", "Sing", "3", inanimate=inan)


def frame_conj_obj(sent, verb, subj, o1, o2, tense, rng):
    out = []
    ann = sent.ann
    v_idx = len(subj.tokens) + 1
    place_np(out, subj, v_idx, "nsubj", ann)
    sent.ent_spans.append((1, len(out), subj))
    out.append(tok(vform(verb, tense, subj.number), verb, "VERB",
                   verb_feats(tense, subj.number), 0, "root"))
    sent.target = v_idx
    o_start = len(out) + 1
    o1_head = place_np(out, o1, v_idx, "obj", ann)
    sent.ent_spans.append((o_start, len(out), o1))
    out.append(tok("and", "and", "CCONJ", {}, 0, "cc"))
    cc_idx = len(out)
    place_np(out, o2, o1_head, "conj", ann)
    out[cc_idx - 1]["head"] = cc_idx + o2.head_idx + 1
    out.append(tok(".", ".", "PUNCT", {}, v_idx, "punct"))
    finish(sent, out)
    sent.reversed_text = (f"{cap_first(np_surface(o1))} and {lower_first(np_surface(o2))} "
                          f"{vform(verb, tense, 'Plur')} {lower_first(np_surface(subj, accusative=True))}.")


def frame_relcl(sent, verb, a_np, b_np, rng):
    """The A the B V-ed MATRIX .  — zero-relativizer object relative;
    B is the agent, A the patient promoted to matrix subject."""
    out = []
    ann = sent.ann
    anim = a_np.anim in ("PERSON", "ANIMATE", "ORGANIZATION")
    mform, mlemma = (("arrived", "arrive") if anim else ("fell", "fall"))
    if rng.random() < 0.4:
        mform, mlemma = (("waited", "wait") if anim else ("stopped", "stop"))
    v_idx = len(a_np.tokens) + len(b_np.tokens) + 1
    m_idx = v_idx + 1
    a_head = place_np(out, a_np, m_idx, "nsubj", ann)
    a_span = (1, len(out))
    b_start = len(out) + 1
    place_np(out, b_np, v_idx, "nsubj", ann)
    b_span = (b_start, len(out))
    out.append(tok(vform(verb, "past"), verb, "VERB", verb_feats("past"),
                   a_head, "acl:relcl"))
    sent.target = v_idx
    out.append(tok(mform, mlemma, "VERB", verb_feats("past"), 0, "root"))
    out.append(tok(".", ".", "PUNCT", {}, m_idx, "punct"))
    sent.ent_spans.append((a_span[0], a_span[1], a_np))
    sent.ent_spans.append((b_span[0], b_span[1], b_np))
    finish(sent, out)
    sent.reversed_text = (f"{cap_first(np_surface(b_np))} "
                          f"{lower_first(np_surface(a_np))} {vform(verb, 'past')} "
                          f"{mform}.")


def frame_advcl(sent, verb, subj, obj, rng):
    """S V O when NP arrived."""
    out = []
    ann = sent.ann
    v_idx = len(subj.tokens) + 1
    place_np(out, subj, v_idx, "nsubj", ann)
    sent.ent_spans.append((1, len(out), subj))
    out.append(tok(vform(verb, "past"), verb, "VERB", verb_feats("past"), 0, "root"))
    sent.target = v_idx
    o_start = len(out) + 1
    place_np(out, obj, v_idx, "obj", ann)
    sent.ent_spans.append((o_start, len(out), obj))
    third = rng.choice(["the guests", "the train", "the police"])
    out.append(tok("when", "when", "SCONJ", {}, 0, "mark"))
    mark_idx = len(out)
    noun = third.split(" ")[1]
    out.append(tok("the", "the", "DET", {"Definite": "Def", "PronType": "Art"}, len(out) + 2, "det"))
    out.append(tok(noun, noun if noun in ("police",) else noun[:-1] if noun.endswith("s") else noun,
                   "NOUN", {"Number": "Plur" if noun.endswith("s") or noun == "police" else "Sing"},
                   len(out) + 2, "nsubj"))
    out.append(tok("arrived", "arrive", "VERB", verb_feats("past"), v_idx, "advcl"))
    adv_idx = len(out)
    out[mark_idx - 1]["head"] = adv_idx
    out.append(tok(".", ".", "PUNCT", {}, v_idx, "punct"))
    finish(sent, out)
    sent.reversed_text = (f"{cap_first(np_surface(obj))} {vform(verb,'past')} "
                          f"{lower_first(np_surface(subj, accusative=True))} when {third} arrived.")

# ---------------------------------------------------------------------------
# gold features: independent implementation of the extraction rules

FEATURE_NAMES = ["trans", "trans_mod", "v_tense", "v_act", "modal", "neg",
                 "is_root", "direction", "sing_sub", "sing_obj", "conj_sub",
                 "conj_obj", "rcp_phrase", "ani_sub", "ani_match",
                 "sub_more_freq", "num_np", "num_clauses"]
MODAL_LEMMAS = {"can", "could", "may", "might", "would", "should"}
NEG_LEMMAS = {"not", "n't", "never"}
CLAUSAL = {"conj", "advcl", "ccomp", "xcomp", "parataxis", "acl", "acl:relcl"}
NOMINAL = {"NOUN", "PROPN", "PRON"}


def children(tokens, idx):
    return [t for t in tokens if t["head"] == idx]


def rcp_indices(tokens):
    """1-based indices of tokens inside 'each other' / 'one another' bigrams."""
    out = set()
    forms = [t["form"].lower() for t in tokens]
    for i in range(len(forms) - 1):
        if (forms[i], forms[i + 1]) in {("each", "other"), ("one", "another")}:
            out.add(i + 1)
            out.add(i + 2)
    return out


def subtree(tokens, idx):
    ids = {idx}
    changed = True
    while changed:
        changed = False
        for t in tokens:
            if t["head"] in ids and t["id"] not in ids:
                ids.add(t["id"])
                changed = True
    return [t for t in tokens if t["id"] in ids]


def find_subject(tokens, t_idx):
    for t in tokens:
        if t["head"] == t_idx and t["deprel"] in ("nsubj", "nsubj:pass"):
            return t
    v = tokens[t_idx - 1]
    if v["deprel"] == "conj" and v["head"] > 0:
        for t in tokens:
            if t["head"] == v["head"] and t["deprel"] in ("nsubj", "nsubj:pass"):
                return t
    return None


def entity_object(tokens, t_idx, rcp):
    """Direct object if present, else nearest oblique nominal; reciprocal
    pronouns refer back to the subject and do not count as an entity."""
    objs = [t for t in tokens if t["head"] == t_idx and t["deprel"] == "obj"
            and t["id"] not in rcp]
    if objs:
        return objs[0]
    obl = [t for t in tokens if t["head"] == t_idx and t["deprel"] in ("iobj", "obl")
           and t["id"] not in rcp and t["upos"] in NOMINAL]
    obl = [t for t in obl
           if not any(c["deprel"] == "case" and c["lemma"] == "by"
                      for c in children(tokens, t["id"]))]
    if obl:
        return min(obl, key=lambda t: abs(t["id"] - t_idx))
    return None


def animate(tok_, tags):
    tag = tags.get(tok_["id"], "NONE")
    if tag in ("PERSON", "ORGANIZATION", "ANIMATE"):
        return True
    if tok_["upos"] == "PRON" and tag != "INANIMATE":
        return True
    return False


def gold_features(tokens, t_idx, tags, ngrams):
    rcp = rcp_indices(tokens)
    target = tokens[t_idx - 1]
    kids = children(tokens, t_idx)
    f = {}
    f["trans"] = int(any(t["deprel"] == "obj" for t in kids))
    tm = 0
    for t in kids:
        if t["deprel"] == "obl":
            cases = [c for c in children(tokens, t["id"]) if c["deprel"] == "case"]
            if cases and all(c["lemma"] != "by" for c in cases):
                tm = 1
        if t["deprel"] == "prep":
            tm = 1
    f["trans_mod"] = tm
    vt = target["feats"].get("Tense") == "Pres"
    for t in kids:
        if t["deprel"] in ("aux", "aux:pass") and t["feats"].get("Tense") == "Pres":
            vt = True
    f["v_tense"] = int(vt)
    f["v_act"] = int(not (target["feats"].get("Voice") == "Pass" or
                          any(t["deprel"] in ("aux:pass", "nsubj:pass") for t in kids)))
    f["modal"] = int(any(t["deprel"] == "aux" and t["lemma"].lower() in MODAL_LEMMAS
                         for t in kids))
    f["neg"] = int(any(t["deprel"] == "advmod" and t["lemma"].lower() in NEG_LEMMAS
                       for t in kids) or target["feats"].get("Polarity") == "Neg")
    f["is_root"] = int(target["deprel"] == "root")
    f["rcp_phrase"] = int(bool(rcp))
    subj = find_subject(tokens, t_idx)
    obj_ent = entity_object(tokens, t_idx, rcp)
    conj_sub = 0
    if subj is not None:
        conj_sub = int(any(t["deprel"] == "conj" for t in children(tokens, subj["id"]))
                       or subj["deprel"] == "conj")
    f["conj_sub"] = conj_sub
    direction = 0
    if subj is not None:
        for t in kids:
            if t["deprel"] in ("obj", "iobj", "obl") and t["id"] > t_idx:
                nominals = [x for x in subtree(tokens, t["id"])
                            if x["upos"] in NOMINAL and x["id"] not in rcp
                            and x["feats"].get("Reflex") != "Yes"]
                if nominals:
                    direction = 1
        if conj_sub and not f["trans"]:
            direction = 0
    f["direction"] = direction
    if subj is None:
        f["sing_sub"] = 0
        f["ani_sub"] = 0
    else:
        f["sing_sub"] = int(subj["feats"].get("Number") == "Sing" and not conj_sub)
        f["ani_sub"] = int(animate(subj, tags))
    if obj_ent is None:
        f["sing_obj"] = 0
        f["conj_obj"] = 0
    else:
        conj_obj = int(any(t["deprel"] == "conj" for t in children(tokens, obj_ent["id"]))
                       or obj_ent["deprel"] == "conj")
        f["conj_obj"] = conj_obj
        f["sing_obj"] = int(obj_ent["feats"].get("Number") == "Sing" and not conj_obj)
    if subj is None:
        f["ani_match"] = 0
        f["sub_more_freq"] = 0
    else:
        if obj_ent is None:
            f["ani_match"] = 1
        else:
            f["ani_match"] = int(animate(subj, tags) == animate(obj_ent, tags))
        vs = tokens[t_idx - 1]["lemma"].lower()
        fs = ngrams.get(subj["lemma"].lower() + " " + vs, 0)
        fo = 0 if obj_ent is None else ngrams.get(obj_ent["lemma"].lower() + " " + vs, 0)
        f["sub_more_freq"] = int(fs > fo)
    f["num_np"] = sum(1 for t in tokens
                      if t["upos"] in NOMINAL and t["deprel"] != "nmod:poss")
    f["num_clauses"] = 1 + sum(1 for t in tokens
                               if t["upos"] == "VERB" and t["deprel"] in CLAUSAL)
    return f


# ---------------------------------------------------------------------------
# frame sampling and rating synthesis

THING_VERBS = {"clash", "mix", "combine", "rhyme", "alternate", "match"}


def pick(rng, pool, avoid=None):
    for _ in range(40):
        np_obj = pool[rng.integers(0, len(pool))]
        if avoid is None or np_obj.head_lemma != avoid.head_lemma:
            return np_obj
    return pool[0]


def frame_menu(verb, group):
    """(frame tag, weight) pairs; tags map to builders in build_sentence."""
    m = []
    trans = TRANS_OK[verb]
    prep = PREP[verb] is not None
    if group == "symmetric":
        if CONJ_INTR_OK[verb]:
            m += [("E", 3.4), ("Q", 0.6), ("LE", 1.1)]
        if trans:
            m += [("F", 1.3), ("G", 0.4), ("R", 0.2), ("P", 0.3)]
        elif prep:
            m += [("GW", 0.6), ("RW", 0.2)]
        if trans:
            m += [("A", 1.9), ("B", 1.0), ("N", 0.5), ("L", 0.4), ("O", 0.4),
                  ("I", 0.5), ("K", 0.35), ("M", 0.3), ("ET", 1.0), ("RC", 1.1)]
            if verb not in ("marry", "meet", "resemble"):
                m += [("H", 1.4)]
        if prep:
            m += [("C", 1.1), ("D", 0.5), ("J", 0.35), ("EP", 1.0)]
    else:
        m += [("A", 1.7), ("B", 0.9), ("H", 1.0), ("I", 0.7), ("K", 0.6),
              ("L", 0.4), ("N", 0.35), ("O", 0.4), ("M", 0.5), ("RC", 0.7)]
        if trans:
            m += [("F", 2.2), ("G", 0.5), ("R", 0.25), ("P", 0.45), ("ET", 0.8), ("LE", 0.7)]
        if prep:
            m += [("C", 0.9), ("D", 0.45), ("EP", 0.6)]
        if CONJ_INTR_OK[verb]:
            m += [("E", 1.8), ("Q", 0.5)]
    return m


def build_sentence(sid, verb, group, tag, pools, rng):
    sent = Sentence(sid, verb, tag)
    sc, oc = verb_args(verb)
    subj_pool = [np_ for k in sc for np_ in pools[k]]
    obj_pool = [np_ for k in oc for np_ in pools[k]]
    plur_subj = [n for n in subj_pool if n.number == "Plur"] or pools["humans_p"]
    subj = pick(rng, subj_pool)
    if verb in THING_VERBS and tag in ("C", "D", "E") and rng.random() < 0.15:
        subj = np_pron("they", "Plur", "3", inanimate=True)
    obj = pick(rng, obj_pool, avoid=subj)
    adv = ADVERBS[rng.integers(0, len(ADVERBS))] if rng.random() < 0.25 else None
    modal = MODALS[rng.integers(0, len(MODALS))]
    if tag == "A":
        frame_trans(sent, verb, subj, obj, "past", rng, adv=adv)
    elif tag == "B":
        frame_trans(sent, verb, subj, obj, "pres", rng, adv=adv)
    elif tag == "C":
        frame_with(sent, verb, subj, obj, "past", rng)
    elif tag == "D":
        frame_with(sent, verb, subj, obj, "pres", rng)
    elif tag == "E":
        n2 = pick(rng, subj_pool, avoid=subj)
        frame_conj(sent, verb, subj, n2, "past", rng, adv=adv)
    elif tag == "Q":
        n2 = pick(rng, subj_pool, avoid=subj)
        frame_conj(sent, verb, subj, n2, "past", rng, neg=True)
    elif tag == "LE":
        n2 = pick(rng, [n for n in subj_pool if n.anim != "PRON"] or subj_pool,
                  avoid=subj)
        s1 = pick(rng, [n for n in subj_pool if n.anim != "PRON"] or subj_pool,
                  avoid=n2)
        frame_conj(sent, verb, s1, n2, "past", rng, embed=True,
                   rcp=TRANS_OK[verb] and not CONJ_INTR_OK[verb])
    elif tag == "F":
        n2 = pick(rng, subj_pool, avoid=subj)
        frame_conj(sent, verb, subj, n2, "past", rng, rcp=True)
    elif tag in ("ET", "EP"):
        n2 = pick(rng, subj_pool, avoid=subj)
        o = pick(rng, obj_pool, avoid=subj)
        while o.head_lemma == n2.head_lemma:
            o = pick(rng, obj_pool, avoid=subj)
        frame_conj_trans(sent, verb, subj, n2, o, "past", rng,
                         prep=PREP[verb] if tag == "EP" else None)
    elif tag == "P":
        n2 = pick(rng, subj_pool, avoid=subj)
        frame_conj(sent, verb, subj, n2, "past", rng, rcp=True, modal=modal)
    elif tag == "G":
        frame_plur_rcp(sent, verb, pick(rng, plur_subj), "past", rng)
    elif tag == "R":
        frame_plur_rcp(sent, verb, pick(rng, plur_subj), "past", rng, one_another=True)
    elif tag in ("GW", "RW"):
        sp = pick(rng, plur_subj)
        frame_with(sent, verb, sp, rcp_np(tag == "RW"), "past", rng)
        sent.reversed_text = sent.text
    elif tag == "H":
        frame_passive(sent, verb, obj, subj, rng)
    elif tag == "I":
        frame_trans(sent, verb, subj, obj, "past", rng, modal=modal)
    elif tag == "J":
        frame_with(sent, verb, subj, obj, "past", rng, modal=modal)
    elif tag == "K":
        frame_trans(sent, verb, subj, obj, "past", rng, neg=True)
    elif tag == "L":
        s2 = subj if subj.anim != "PRON" else pick(rng, [n for n in subj_pool
                                                         if n.anim != "PRON"] or subj_pool)
        frame_trans(sent, verb, s2, obj, "past", rng, embed=True)
    elif tag == "M":
        anim_obj = [n for n in obj_pool
                    if n.anim in ("PERSON", "ANIMATE", "ORGANIZATION", "PRON")]
        o = pick(rng, anim_obj or obj_pool, avoid=subj)
        frame_bicoord(sent, verb, subj, o, rng,
                      adv="too" if rng.random() < 0.7 else None)
    elif tag == "N":
        o2 = pick(rng, obj_pool, avoid=obj)
        frame_conj_obj(sent, verb, subj, obj, o2, "past", rng)
    elif tag == "O":
        frame_advcl(sent, verb, subj, obj, rng)
    elif tag == "RC":
        det_objs = [n for n in obj_pool if n.tokens[0][1] in ("the",)]
        det_subs = [n for n in subj_pool if n.tokens[0][1] in ("the",)]
        a = pick(rng, det_objs or obj_pool)
        b = pick(rng, det_subs or subj_pool, avoid=a)
        frame_relcl(sent, verb, a, b, rng)
    else:
        raise ValueError(tag)
    return sent


def rcp_np(one_another):
    if one_another:
        t = [("DET", "one", "one", {}, "det"), ("PRON", "another", "another",
             {"PronType": "Rcp"}, "head")]
        return NP(t, 1, "Plur", "PRON", "another")
    t = [("DET", "each", "each", {}, "det"), ("PRON", "other", "other",
         {"PronType": "Rcp"}, "head")]
    return NP(t, 1, "Plur", "PRON", "other")


CTX_SD = 0.66
VERB_SD = 0.22


def is_mutual(feats, tag):
    """Constructions that force a reciprocal reading: conjoined subject with
    no separate object entity, reciprocal pronouns, or paired clauses."""
    if tag == "M":
        return True
    if feats["rcp_phrase"]:
        return True
    return bool(feats["conj_sub"]) and feats["direction"] == 0


def mean_similarity(feats, group, tag, ctx, verb_idio):
    mutual = is_mutual(feats, tag)
    if group == "asymmetric":
        base, w_conj, w_rcp, cap, soft = 4.55, 2.35, 1.25, 2.85, 0.55
    else:
        base, w_conj, w_rcp, cap, soft = 1.95, 0.72, 0.35, 0.95, 0.25
    if tag == "M":
        drop = cap
    elif mutual:
        drop = min(w_conj * feats["conj_sub"] + w_rcp * feats["rcp_phrase"], cap)
    elif feats["conj_sub"]:
        # joint subjects soften the directional reading even with an object
        drop = soft
    else:
        drop = 0.0
    mu = base - drop + verb_idio
    mu += 0.12 * feats["direction"] + 0.20 * feats["sub_more_freq"]
    mu += -0.10 * feats["neg"] - 0.08 * feats["modal"]
    if feats["ani_match"] == 0:
        mu += 0.30
    if feats["v_act"] == 0:
        mu += 0.15
    return float(np.clip(mu + ctx, 1.0, 5.0))


ALL_VERBS = SYMMETRIC + ASYMMETRIC
GROUP = {v: "symmetric" for v in SYMMETRIC}
GROUP.update({v: "asymmetric" for v in ASYMMETRIC})

FRAME_CAP = {"E": 5, "A": 3, "C": 3}

# contextual encoder knobs (tuned so a linear probe on the vectors is decent
# but clearly below what the feature-supervised adapter can recover)
PRE_SCALE = 3.0
CTX_GAIN = 0.9
VSEM_GAIN = 3.0
CTX_NOISE = 0.45
XOR_GAIN = 1.1
XOR_SCALE = 2.0
EMB_DIM = 64
STATIC_DIM = 50
OOV_WORDS = {"vase", "goat", "stew", "harbor", "valley", "melody", "fox",
             "each", "other", "one", "another", "did", "not", "was", "were"}


def sample_frames(verb, group, rng):
    menu = frame_menu(verb, group)
    tags = [t for t, _ in menu]
    w = np.array([x for _, x in menu], float)
    p = w / w.sum()
    out, counts = [], {}
    guard = 0
    while len(out) < 10:
        guard += 1
        if guard > 4000:
            raise RuntimeError(f"cannot fill frames for {verb}")
        t = tags[int(rng.choice(len(tags), p=p))]
        if counts.get(t, 0) >= FRAME_CAP.get(t, 2):
            continue
        counts[t] = counts.get(t, 0) + 1
        out.append(t)
    return out


def build_all(seed):
    pools = build_pools()
    sents = []
    sid_n = 0
    for verb in ALL_VERBS:
        rng = np.random.default_rng([seed, hash_verb(verb)])
        frames = sample_frames(verb, GROUP[verb], rng)
        if verb == "push":
            frames[0] = "M_GOLD"
        for tag in frames:
            sid_n += 1
            sid = f"s{sid_n:03d}"
            if tag == "M_GOLD":
                sent = Sentence(sid, verb, "M")
                frame_bicoord(sent, verb, np_pron("I", "Sing", "1"),
                              np_poss("my", "friends", "friend", "Plur", "ANIMATE"),
                              rng, adv="too")
            else:
                sent = build_sentence(sid, verb, GROUP[verb], tag, pools, rng)
            sents.append(sent)
    return sents


def hash_verb(v):
    h = 2166136261
    for ch in v.encode():
        h = ((h ^ ch) * 16777619) & 0xFFFFFFFF
    return h


def build_ngrams(sents, rng):
    counts = {"i push": 420, "friend push": 35}
    for s in sents:
        rcp = rcp_indices(s.tokens)
        subj = find_subject(s.tokens, s.target)
        obj = entity_object(s.tokens, s.target, rcp)
        if subj is None:
            continue
        ks = subj["lemma"].lower() + " " + s.verb
        ko = None if obj is None else obj["lemma"].lower() + " " + s.verb
        if GROUP[s.verb] == "asymmetric" and ko is not None and rng.random() < 0.72:
            if ks not in counts and ko not in counts:
                counts[ks] = int(rng.integers(120, 600))
                counts[ko] = int(rng.integers(1, 80))
                continue
        if ks not in counts and rng.random() < 0.55:
            counts[ks] = int(rng.integers(5, 300))
        if ko is not None and ko not in counts and rng.random() < 0.55:
            counts[ko] = int(rng.integers(5, 300))
    return counts


def all_gold(sents, ngrams):
    feats = {}
    for s in sents:
        tags = dict(s.ann)
        feats[s.sid] = gold_features(s.tokens, s.target, tags, ngrams)
    return feats


def synth_ratings(sents, feats, rng):
    idio = {v: float(rng.normal(0, VERB_SD)) for v in ALL_VERBS}
    ctxs, ratings = {}, {}
    for s in sents:
        ctx = float(np.clip(rng.normal(0, CTX_SD), -1.2, 1.2))
        mu = mean_similarity(feats[s.sid], GROUP[s.verb], s.frame, ctx, idio[s.verb])
        sd = 0.22 + 0.55 * (1.0 - abs(mu - 3.0) / 2.0) * \
            (0.6 + 0.4 * min(abs(ctx), 0.66) / 0.66)
        if abs(mu - round(mu)) < 0.3:
            sd *= 0.3
        rs = np.clip(np.rint(rng.normal(mu, sd, 7)), 1, 5).astype(int)
        ctxs[s.sid] = ctx
        ratings[s.sid] = rs
    return ctxs, ratings, idio


def binarize18(f):
    v = []
    for k in FEATURE_NAMES:
        if k == "num_np":
            v.append(1.0 if f[k] >= 3 else 0.0)
        elif k == "num_clauses":
            v.append(1.0 if f[k] >= 2 else 0.0)
        else:
            v.append(float(f[k]))
    return np.array(v)


def raw18(f):
    return np.array([float(f[k]) for k in FEATURE_NAMES])


def contextual_vectors(sents, feats, ctxs, rng):
    # Mutual-construction bits ride on an XOR carrier: recoverable with one
    # hidden layer, invisible to a linear probe of the raw vectors.
    vsem = {v: rng.normal(0.0, 1.0, 3) for v in ALL_VERBS}
    lin_names = [k for k in FEATURE_NAMES if k != "conj_sub"]
    fidx = {k: i for i, k in enumerate(FEATURE_NAMES)}
    in_dim = len(lin_names) + 2 + 1 + 3
    A = rng.normal(0.0, 1.0, (EMB_DIM, in_dim))
    A2 = rng.normal(0.0, 1.0, (EMB_DIM, 2))
    c = rng.normal(0.0, 0.3, EMB_DIM)
    vecs = {}
    for s in sents:
        f = feats[s.sid]
        bfull = binarize18(f)
        blin = np.array([bfull[fidx[k]] for k in lin_names]) * 2.0 - 1.0
        g = 1.0 if GROUP[s.verb] == "asymmetric" else -1.0
        car = (hash_verb(s.sid) >> 3) & 1
        conj = int(bfull[fidx["conj_sub"]])
        mut = 1 if is_mutual(f, s.frame) else 0
        z = np.array([float(conj ^ car), float(mut ^ car)]) * 2.0 - 1.0
        phi = np.concatenate([blin, [g, car * 2.0 - 1.0],
                              [CTX_GAIN * ctxs[s.sid] / CTX_SD],
                              VSEM_GAIN * vsem[s.verb]])
        h = (np.tanh(A @ phi / PRE_SCALE + c)
             + XOR_GAIN * np.tanh(A2 @ z / XOR_SCALE)
             + rng.normal(0.0, CTX_NOISE, EMB_DIM))
        vecs[s.sid] = h
    return vecs


def static_table(sents, rng):
    vocab = set()
    for s in sents:
        for t in s.tokens:
            if t["upos"] != "PUNCT":
                vocab.add(t["form"].lower())
    vocab -= OOV_WORDS
    words = sorted(vocab)
    return {w: rng.normal(0.0, 0.2, STATIC_DIM) for w in words}


def mean_pool(sent, table):
    acc = np.zeros(STATIC_DIM)
    n = 0
    for t in sent.tokens:
        v = table.get(t["form"].lower())
        if v is not None:
            acc += v
            n += 1
    return acc / n if n else acc


def verb_scores(sents, ratings, rng):
    means = {}
    for v in ALL_VERBS:
        rs = [np.mean(ratings[s.sid]) for s in sents if s.verb == v]
        means[v] = float(np.mean(rs))
    chosen = sorted(list(rng.choice(SYMMETRIC, 11, replace=False)) +
                    list(rng.choice(ASYMMETRIC, 11, replace=False)))
    return {v: float(np.clip(6.0 - means[v] + rng.normal(0, 0.28), 1.0, 5.0))
            for v in chosen}


# ---------------------------------------------------------------------------
# writers

def feats_str(feats):
    if not feats:
        return "_"
    return "|".join(f"{k}={v}" for k, v in sorted(feats.items(), key=lambda kv: kv[0].lower()))


def write_bundle(outdir, sents, feats, ratings, ngrams, ctx_vecs, stat_tab, scores):
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "sis.tsv", "w") as f:
        f.write("sentence_id\tverb\tgroup\ttext\treversed_text\t" +
                "\t".join(f"r{i}" for i in range(1, 8)) + "\n")
        for s in sents:
            rs = "\t".join(str(int(r)) for r in ratings[s.sid])
            f.write(f"{s.sid}\t{s.verb}\t{GROUP[s.verb]}\t{s.text}\t{s.reversed_text}\t{rs}\n")
    with open(outdir / "sis.conllu", "w") as f:
        for s in sents:
            f.write(f"# sent_id = {s.sid}\n# text = {s.text}\n")
            for t in s.tokens:
                f.write("\t".join([str(t["id"]), t["form"], t["lemma"], t["upos"], "_",
                                   feats_str(t["feats"]), str(t["head"]), t["deprel"],
                                   "_", "_"]) + "\n")
            f.write("\n")
    with open(outdir / "annotations.tsv", "w") as f:
        for s in sents:
            for idx, tag in sorted(s.ann):
                f.write(f"{s.sid}\t{idx}\t{tag}\n")
    with open(outdir / "ngrams.tsv", "w") as f:
        for k in sorted(ngrams):
            f.write(f"{k}\t{ngrams[k]}\n")
    with open(outdir / "gold_features.tsv", "w") as f:
        f.write("sentence_id\t" + "\t".join(FEATURE_NAMES) + "\n")
        for s in sents:
            row = "\t".join(str(int(feats[s.sid][k])) for k in FEATURE_NAMES)
            f.write(f"{s.sid}\t{row}\n")
    with open(outdir / "embeddings_static.txt", "w") as f:
        for w in sorted(stat_tab):
            vec = " ".join(f"{x:.6f}" for x in stat_tab[w])
            f.write(f"{w} {vec}\n")
    with open(outdir / "contextual.tsv", "w") as f:
        f.write(f"dim\t{EMB_DIM}\n")
        for s in sents:
            vec = " ".join(f"{x:.6f}" for x in ctx_vecs[s.sid])
            f.write(f"{s.sid}\t{vec}\n")
    with open(outdir / "verb_scores.tsv", "w") as f:
        for v in sorted(scores):
            f.write(f"{v}\t{scores[v]:.4f}\n")
    with open(outdir / "sis.ini", "w") as f:
        f.write("""[data]
corpus = sis.tsv
conllu = sis.conllu
annotations = annotations.tsv
ngrams = ngrams.tsv
static_embeddings = embeddings_static.txt
contextual = contextual.tsv
verb_scores = verb_scores.tsv
gold_features = gold_features.tsv

[model]
alpha = 1.0
hidden = 128
stage1_epochs = 120
stage2_epochs = 60
learning_rate = 0.001
batch_size = 32

[eval]
error_threshold = 1.0
sd_factor = 0.1
pred_gap = 1.0
min_group = 2
importance_repeats = 10
""")


# ---------------------------------------------------------------------------
# calibration check: numpy mirror of the evaluation pipeline

def ridge_fit(X, y, alpha=1.0):
    n, d = X.shape
    A = np.zeros((d + 1, d + 1))
    A[:d, :d] = X.T @ X + (alpha / 2.0) * np.eye(d)
    A[:d, d] = X.sum(0)
    A[d, :d] = X.sum(0)
    A[d, d] = n
    b = np.concatenate([X.T @ y, [y.sum()]])
    z = np.linalg.solve(A, b)
    return z[:d], z[d]


def lopo_ridge(X, y, verb_of):
    preds = np.zeros(len(y))
    models = {}
    for v in sorted(set(verb_of)):
        tr = np.array([i for i in range(len(y)) if verb_of[i] != v])
        te = np.array([i for i in range(len(y)) if verb_of[i] == v])
        w, b = ridge_fit(X[tr], y[tr])
        models[v] = (w, b)
        preds[te] = X[te] @ w + b
    return preds, models


def pearson(a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    am, bm = a - a.mean(), b - b.mean()
    den = np.sqrt((am * am).sum() * (bm * bm).sum())
    return float((am * bm).sum() / den) if den > 0 else 0.0


def relu(x):
    return np.maximum(x, 0.0)


class AdamState:
    def __init__(self, shapes):
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, params, grads, lr):
        self.t += 1
        b1, b2, eps = 0.9, 0.999, 1e-8
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = b1 * self.m[i] + (1 - b1) * g
            self.v[i] = b2 * self.v[i] + (1 - b2) * g * g
            mh = self.m[i] / (1 - b1 ** self.t)
            vh = self.v[i] / (1 - b2 ** self.t)
            p -= lr * mh / (np.sqrt(vh) + eps)


def hybrid_fold(Xc, Phi, y, tr, te, seed, hidden, e1, e2, lr, batch, alpha=1.0, freeze=False):
    rng = np.random.default_rng(seed)
    din = Xc.shape[1]
    W1 = rng.uniform(-1, 1, (hidden, din)) / np.sqrt(din)
    b1v = np.zeros(hidden)
    Wc = rng.uniform(-1, 1, (18, hidden)) / np.sqrt(hidden)
    bc = np.zeros(18)
    st1 = AdamState([W1.shape, b1v.shape, Wc.shape, bc.shape])
    n = len(tr)
    cur_lr, best, stall = lr, np.inf, 0
    for ep in range(e1):
        order = rng.permutation(n)
        for s0 in range(0, n, batch):
            idx = tr[order[s0:s0 + batch]]
            X = Xc[idx]
            T = Phi[idx]
            H = relu(X @ W1.T + b1v)
            Z = H @ Wc.T + bc
            P = 1.0 / (1.0 + np.exp(-Z))
            Pc = np.clip(P, 1e-7, 1 - 1e-7)
            dZ = (Pc - T) / len(idx)
            gWc = dZ.T @ H
            gbc = dZ.sum(0)
            dH = dZ @ Wc
            dH[H <= 0] = 0.0
            gW1 = dH.T @ X
            gb1 = dH.sum(0)
            st1.step([W1, b1v, Wc, bc], [gW1, gb1, gWc, gbc], cur_lr)
        Ha = relu(Xc[tr] @ W1.T + b1v)
        Pa = np.clip(1.0 / (1.0 + np.exp(-(Ha @ Wc.T + bc))), 1e-7, 1 - 1e-7)
        ep_loss = -np.mean(np.sum(Phi[tr] * np.log(Pa) + (1 - Phi[tr]) * np.log(1 - Pa), axis=1))
        if ep_loss < best * (1.0 - 1e-7):
            best, stall = ep_loss, 0
        else:
            stall += 1
            if stall >= 10:
                break
    w = rng.uniform(-1, 1, hidden) / np.sqrt(hidden)
    b = 0.0
    st2 = AdamState([w.shape, (1,), W1.shape, b1v.shape])
    barr = np.array([b])
    cur_lr, best, stall = lr, np.inf, 0
    for ep in range(e2):
        order = rng.permutation(n)
        for s0 in range(0, n, batch):
            idx = tr[order[s0:s0 + batch]]
            X = Xc[idx]
            H = relu(X @ W1.T + b1v)
            pred = H @ w + barr[0]
            r = pred - y[idx]
            gw = 2.0 * (H.T @ r) + alpha * (len(idx) / n) * w
            gb = np.array([2.0 * r.sum()])
            if freeze:
                st2.step([w, barr], [gw, gb], cur_lr)
            else:
                dH = 2.0 * r[:, None] * w[None, :]
                dH[H <= 0] = 0.0
                gW1 = dH.T @ X
                gb1 = dH.sum(0)
                st2.step([w, barr, W1, b1v], [gw, gb, gW1, gb1], cur_lr)
        Ha = relu(Xc[tr] @ W1.T + b1v)
        ra = Ha @ w + barr[0] - y[tr]
        ep_loss = float(ra @ ra) + 0.5 * alpha * float(w @ w)
        if ep_loss < best * (1.0 - 1e-7):
            best, stall = ep_loss, 0
        else:
            stall += 1
            if stall >= 10:
                break
    Hte = relu(Xc[te] @ W1.T + b1v)
    return Hte @ w + barr[0]


def lopo_hybrid(Xc, Phi, y, verb_of, seed, hidden=128, e1=120, e2=60, lr=1e-3, batch=32):
    preds = np.zeros(len(y))
    for v in sorted(set(verb_of)):
        tr = np.array([i for i in range(len(y)) if verb_of[i] != v])
        te = np.array([i for i in range(len(y)) if verb_of[i] == v])
        fs = (seed ^ hash_verb(v)) & 0x7FFFFFFF
        preds[te] = hybrid_fold(Xc, Phi, y, tr, te, fs, hidden, e1, e2, lr, batch)
    return preds


def importance_check(X, y, verb_of, models, base_preds, rng, repeats=10):
    r2_base = pearson(base_preds, y) ** 2
    folds = {v: np.array([i for i in range(len(y)) if verb_of[i] == v])
             for v in sorted(set(verb_of))}
    imps = []
    for j in range(X.shape[1]):
        drops = []
        for _ in range(repeats):
            Xp = X.copy()
            Xp[:, j] = Xp[rng.permutation(len(y)), j]
            preds = np.zeros(len(y))
            for v, te in folds.items():
                w, b = models[v]
                preds[te] = Xp[te] @ w + b
            drops.append(r2_base - pearson(preds, y) ** 2)
        imps.append(float(np.mean(drops)))
    return imps


def controlled_subset(sents, feats, ratings, y, preds_by_model, sd_factor=0.1,
                      pred_gap=1.0, min_group=2):
    # Per-sentence inter-rater SD gate, then signature grouping, then the
    # joint prediction-gap gate over the reference model set.
    sid_ix = {s.sid: i for i, s in enumerate(sents)}
    sd_all = float(np.std(y, ddof=1))
    groups = {}
    for s in sents:
        if float(np.std(ratings[s.sid], ddof=1)) > sd_factor * sd_all:
            continue
        i = sid_ix[s.sid]
        if not all(abs(p[i] - y[i]) < pred_gap for p in preds_by_model.values()):
            continue
        key = tuple(int(x) for x in binarize18(feats[s.sid]))
        groups.setdefault(key, []).append(s.sid)
    kept = [sids for sids in groups.values() if len(sids) >= min_group]
    flat = [sid_ix[x] for g in kept for x in g]
    out = {"groups": len(kept), "sentences": len(flat)}
    for name, p in preds_by_model.items():
        if flat:
            out[f"mse_{name}"] = float(np.mean([(p[i] - y[i]) ** 2 for i in flat]))
    return out


def run_check(sents, feats, ratings, ctx_vecs, stat_tab, scores, seed, with_hybrid):
    y = np.array([np.mean(ratings[s.sid]) for s in sents])
    verb_of = [s.verb for s in sents]
    Xf = np.stack([raw18(feats[s.sid]) for s in sents])
    Xs = np.stack([mean_pool(s, stat_tab) for s in sents])
    Xc = np.stack([ctx_vecs[s.sid] for s in sents])
    Phi = np.stack([binarize18(feats[s.sid]) for s in sents])

    pf, mf = lopo_ridge(Xf, y, verb_of)
    ps, _ = lopo_ridge(Xs, y, verb_of)
    pc, _ = lopo_ridge(Xc, y, verb_of)
    res = {}
    for name, p in [("feature", pf), ("static", ps), ("contextual", pc)]:
        res[name] = (pearson(p, y), float(np.mean((p - y) ** 2)))
        print(f"{name:11s} r={res[name][0]:.3f}  mse={res[name][1]:.3f}")
    preds = {"feature": pf, "static": ps, "contextual": pc}
    if with_hybrid:
        ph = lopo_hybrid(Xc, Phi, y, verb_of, seed)
        res["hybrid"] = (pearson(ph, y), float(np.mean((ph - y) ** 2)))
        print(f"{'hybrid':11s} r={res['hybrid'][0]:.3f}  mse={res['hybrid'][1]:.3f}")
        preds["hybrid"] = ph

    rng = np.random.default_rng(seed + 999)
    imps = importance_check(Xf, y, verb_of, mf, pf, rng)
    order = np.argsort(imps)[::-1]
    print("importance top5:", [(FEATURE_NAMES[i], round(imps[i], 4)) for i in order[:5]])

    errs = {n: {i for i in range(len(y)) if abs(p[i] - y[i]) > 1.0}
            for n, p in preds.items()}
    print("errors:", {n: len(e) for n, e in errs.items()})

    unique, unanimous = set(), 0
    for s in sents:
        rs = ratings[s.sid]
        if len(set(int(r) for r in rs)) == 1:
            unanimous += 1
    print("unanimous sentences:", unanimous)

    ctrl_models = {k: preds[k] for k in ("feature", "contextual") if k in preds}
    if "hybrid" in preds:
        ctrl_models["hybrid"] = preds["hybrid"]
    ctrl = controlled_subset(sents, feats, ratings, y, ctrl_models)
    print("controlled subset:", ctrl)

    vm = {}
    for v in ALL_VERBS:
        vm[v] = float(np.mean([np.mean(ratings[s.sid]) for s in sents if s.verb == v]))
    common = sorted(scores)
    inv = [6.0 - vm[v] for v in common]
    ext = [scores[v] for v in common]
    print(f"verb replication r={pearson(inv, ext):.3f} over {len(common)} verbs")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data", type=Path)
    ap.add_argument("--seed", default=7, type=int)
    ap.add_argument("--check", action="store_true")
    ap.add_argument("--check-hybrid", action="store_true")
    ap.add_argument("--skip-write", action="store_true")
    args = ap.parse_args()

    sents = build_all(args.seed)
    assert len(sents) == 400, len(sents)
    rng = np.random.default_rng(args.seed + 1)
    ngrams = build_ngrams(sents, rng)
    feats = all_gold(sents, ngrams)
    ctxs, ratings, idio = synth_ratings(sents, feats, np.random.default_rng(args.seed + 2))
    ctx_vecs = contextual_vectors(sents, feats, ctxs, np.random.default_rng(args.seed + 3))
    stat_tab = static_table(sents, np.random.default_rng(args.seed + 4))
    scores = verb_scores(sents, ratings, np.random.default_rng(args.seed + 5))

    if not args.skip_write:
        write_bundle(args.out, sents, feats, ratings, ngrams, ctx_vecs, stat_tab, scores)
        ndir = sum(1 for s in sents if feats[s.sid]["direction"] == 1)
        print(f"wrote bundle to {args.out} ({len(sents)} sentences, "
              f"{ndir} directional)")
    if args.check or args.check_hybrid:
        run_check(sents, feats, ratings, ctx_vecs, stat_tab, scores,
                  args.seed, args.check_hybrid)


if __name__ == "__main__":
    main()
