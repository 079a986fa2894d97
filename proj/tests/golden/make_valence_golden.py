"""Regenerates tests/data/valence_golden.tsv from the reference Python
implementation (pip install vaderSentiment==3.3.2).

The reference rounds compound to 4 decimals; this script reports the
unrounded values so the C++ engine can be compared at 1e-4 and tighter.

    python3 tests/golden/make_valence_golden.py > tests/data/valence_golden.tsv
"""

import math
import sys

from vaderSentiment import vaderSentiment as vs

SENTENCES = [
    "no fear that a hacker can get access to your camera or thermostat or other electronic "
    "devices. your privacy is 100% protected because the technology is inside your "
    "electronics and not located on any server across the world.",
    "good",
    "VADER is smart, handsome, and funny.",
    "VADER is smart, handsome, and funny!",
    "VADER is very smart, handsome, and funny.",
    "VADER is VERY SMART, handsome, and FUNNY.",
    "VADER is VERY SMART, handsome, and FUNNY!!!",
    "VADER is not smart, handsome, nor funny.",
    "At least it isn't a horrible book.",
    "The book was only kind of good.",
    "The plot was good, but the characters are uncompelling and the dialog is not great.",
    "Today SUX!",
    "Today only kinda sux! But I'll get by, lol",
    "Make sure you :) or :D today!",
    "Catch utf-8 emoji such as \U0001F498 and \U0001F48B and \U0001F601",
    "Not bad at all",
    "the new 5g network is never so good",
    "this drone is the shit!",
    "blockchain is a bad ass technology",
    "I am not sure whether this works???",
    "wearables are cool?? or kind of creepy",
    "nothing good ever comes from this surveillance tech",
    "it's a huge security risk and the battery life sucks",
    "cloud native platforms are great but expensive",
    "the grid went down, no power again",
]


class Unrounded(vs.SentimentIntensityAnalyzer):
    def score_valence(self, sentiments, text):
        if not sentiments:
            return {"compound": 0.0, "pos": 0.0, "neg": 0.0, "neu": 1.0}
        total = float(sum(sentiments))
        punct = self._punctuation_emphasis(text)
        if total > 0:
            total += punct
        elif total < 0:
            total -= punct
        compound = vs.normalize(total)
        pos, neg, neu = self._sift_sentiment_scores(sentiments)
        if pos > math.fabs(neg):
            pos += punct
        elif pos < math.fabs(neg):
            neg -= punct
        mass = pos + math.fabs(neg) + neu
        return {
            "compound": compound,
            "pos": math.fabs(pos / mass),
            "neg": math.fabs(neg / mass),
            "neu": math.fabs(neu / mass),
        }


def main():
    analyzer = Unrounded()
    out = sys.stdout
    out.write("text\tcompound\tpos\tneg\tneu\n")
    for s in SENTENCES:
        r = analyzer.polarity_scores(s)
        out.write("%s\t%.17g\t%.17g\t%.17g\t%.17g\n" % (s, r["compound"], r["pos"], r["neg"], r["neu"]))


if __name__ == "__main__":
    main()
