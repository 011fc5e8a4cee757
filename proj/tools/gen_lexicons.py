#!/usr/bin/env python3
"""Regenerate the bundled lexicons and seed term lists under data/."""
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"

DET = "a an the this that these those each every some any no all both either neither such another".split()
ADP = ("of in on at by for with from to into onto upon over under between among through during before after above below "
       "about against across along around behind beyond within without via per toward towards throughout versus vs despite "
       "near since until than like unlike").split()
OTHER = ("and or but nor so yet if whether because while although though whereas unless when where which who whom whose what "
         "why how it its we our us they their them he his she her i my you your one ones itself themselves ourselves "
         "not also only very too thus hence however therefore moreover furthermore further here there then as").split()
VERBS = ("is are was were be been being am has have had having do does did done can could may might must shall should will would "
         "show shows showed shown use uses used using present presents presented report reports reported describe describes described "
         "propose proposes proposed find finds found investigate investigates investigated obtain obtains obtained observe observes observed "
         "provide provides provided suggest suggests suggested indicate indicates indicated reveal reveals revealed demonstrate demonstrates "
         "demonstrated develop develops developed discuss discusses discussed examine examines examined determine determines determined "
         "consider considers considered compare compares compared allow allows allowed require requires required include includes included "
         "contain contains contained give gives gave given make makes made take takes took taken become becomes became remain remains remained "
         "appear appears appeared seem seems seemed yield yields yielded lead leads led cause causes caused induce induces induced "
         "affect affects affected reduce reduces reduced enhance enhances enhanced improve improves improved increase increases increased "
         "decrease decreases decreased measure measures measured perform performs performed apply applies applied study studied studies "
         "test tests tested analyze analyzes analyzed introduce introduces introduced create creates created discover discovers discovered "
         "devise devises devised identify identifies identified confirm confirms confirmed support supports supported achieve achieves achieved "
         "produce produces produced form forms formed exhibit exhibits exhibited").split()
# ambiguous surfaces that read as nouns in titles
NOUNISH = set("study studies measure measures increase increases decrease decreases form forms test tests use uses support report reports".split())
ADV = "not also only very well still often usually generally highly significantly respectively recently previously directly strongly".split()
ADJ = ("new novel high higher highest low lower lowest large larger largest small smaller smallest good better best great greater old "
       "young long short first second third other same different important significant recent current major minor main human whole free "
       "full wide strong weak rapid simple complex direct open early late possible available efficient sufficient relevant due able certain "
       "similar particular molecular cellular nuclear linear nonlinear regular solar vascular muscular polar stellar present specific "
       "various several many much more most less least few").split()
NUM = "zero one two three four five six seven eight nine ten hundred thousand million".split()

IRREGULAR_NOUNS = {
    "children": "child", "mice": "mouse", "men": "man", "women": "woman", "teeth": "tooth", "feet": "foot", "geese": "goose",
    "analyses": "analysis", "hypotheses": "hypothesis", "theses": "thesis", "syntheses": "synthesis", "diagnoses": "diagnosis",
    "prognoses": "prognosis", "phenomena": "phenomenon", "criteria": "criterion", "spectra": "spectrum", "nuclei": "nucleus",
    "fungi": "fungus", "bacteria": "bacterium", "indices": "index", "matrices": "matrix", "vertices": "vertex",
    "appendices": "appendix", "genera": "genus", "stimuli": "stimulus", "foci": "focus", "radii": "radius", "loci": "locus",
    "media": "medium", "strata": "stratum", "maxima": "maximum", "minima": "minimum", "species": "species", "series": "series",
    "data": "data", "physics": "physics", "mathematics": "mathematics", "genetics": "genetics", "dynamics": "dynamics",
    "kinetics": "kinetics", "statistics": "statistics", "economics": "economics", "optics": "optics", "mechanics": "mechanics",
    "electronics": "electronics", "gas": "gas", "gases": "gas", "lens": "lens", "lenses": "lens", "virus": "virus",
    "viruses": "virus", "bias": "bias", "biases": "bias", "axes": "axis", "process": "process", "processes": "process",
    "class": "class", "classes": "class", "status": "status", "apparatus": "apparatus", "corpus": "corpus",
    "analysis": "analysis", "basis": "basis", "crisis": "crisis", "crises": "crisis", "thesis": "thesis",
}
IRREGULAR_VERBS = {
    "is": "be", "are": "be", "was": "be", "were": "be", "been": "be", "being": "be", "am": "be", "has": "have", "had": "have",
    "having": "have", "does": "do", "did": "do", "done": "do", "found": "find", "shown": "show", "showed": "show", "made": "make",
    "gave": "give", "given": "give", "took": "take", "taken": "take", "became": "become", "led": "lead", "used": "use",
    "uses": "use", "using": "use", "studied": "study", "studies": "study", "applied": "apply", "applies": "apply",
    "identified": "identify", "identifies": "identify",
}
for base in ("produce induce reduce cause compare require describe propose introduce create devise achieve analyze increase "
             "decrease measure examine determine improve enhance indicate demonstrate discuss obtain observe provide suggest reveal "
             "develop include contain allow exhibit confirm support form test remain appear seem yield affect investigate report "
             "present discover consider perform").split():
    past = base + "d" if base.endswith("e") else base + "ed"
    third = base + "es" if base.endswith("s") else base + "s"
    IRREGULAR_VERBS.setdefault(past, base)
    IRREGULAR_VERBS.setdefault(third, base)

STOP = ("abstract university journal paper article author authors study studies result results conclusion introduction summary "
        "report review chapter section figure table et al fig copyright rights reserved elsevier springer wiley press proceedings "
        "conference symposium volume issue page pages editor editorial letter note notes department institute school college "
        "work purpose aim aims objective objectives background method methods discussion finding findings "
        "case cases example examples part parts way ways thing things fact facts number numbers kind kinds type types "
        "also may might must can could would should will shall").split()
REMOVAL = ("autonomous conservative movement effect effects analysis system systems model models data high low large small "
           "different various use increase decrease level levels rate rates change changes factor factors role problem problems "
           "development approach approaches application applications property properties structure structures function functions "
           "process processes condition conditions activity activities response responses performance value values measurement "
           "measurements characteristic characteristics relationship relationships influence evaluation assessment investigation "
           "new novel specific general important significant major minor main recent current potential possible "
           "control technique techniques theory time times term terms period year years group groups").split()
NLTK = ("i me my myself we our ours ourselves you your yours yourself yourselves he him his himself she her hers herself it its itself "
        "they them their theirs themselves what which who whom this that these those am is are was were be been being have has had having "
        "do does did doing a an the and but if or because as until while of at by for with about against between into through during "
        "before after above below to from up down in out on off over under again further then once here there when where why how all any "
        "both each few more most other some such no nor not only own same so than too very s t can will just don should now d ll m o re ve y "
        "ain aren couldn didn doesn hadn hasn haven isn ma mightn mustn needn shan shouldn wasn weren won wouldn").split()
EXTRA = ("among upon via within without whereas whether however therefore thus hence also although though yet either neither "
         "one two three four five six seven eight nine ten eleven twelve hundred thousand million billion first second third "
         "monday tuesday wednesday thursday friday saturday sunday january february march april june july august september october "
         "november december boston london paris berlin tokyo usa europe america china japan germany france england john marie "
         "harvard stanford oxford cambridge").split()


def main():
    seen = set()
    tags = ["# surface<TAB>POS; consulted before the suffix rules"]

    def add(w, p):
        if w not in seen:
            seen.add(w)
            tags.append(f"{w}\t{p}")

    for w in DET: add(w, "DET")
    for w in ADP: add(w, "ADP")
    for w in OTHER: add(w, "OTHER")
    for w in VERBS: add(w, "NOUN" if w in NOUNISH else "VERB")
    for w in ADV: add(w, "ADV")
    for w in ADJ: add(w, "ADJ")
    for w in NUM: add(w, "NUM")
    (OUT / "tag_lexicon.tsv").write_text("\n".join(tags) + "\n")

    lem = ["# surface<TAB>POS<TAB>lemma; POS * matches any tag"]
    lem += [f"{s}\tNOUN\t{l}" for s, l in sorted(IRREGULAR_NOUNS.items())]
    lem += [f"{s}\tVERB\t{l}" for s, l in sorted(IRREGULAR_VERBS.items())]
    (OUT / "lemma_lexicon.tsv").write_text("\n".join(lem) + "\n")

    stop = sorted(set(STOP))
    removal = sorted(set(REMOVAL) - set(stop))
    natural = sorted(set(NLTK + EXTRA + [chr(c) for c in range(ord("a"), ord("z") + 1)]) - set(removal))
    (OUT / "stop_words.txt").write_text("# seed stop words\n" + "\n".join(stop) + "\n")
    (OUT / "removal_words.txt").write_text("# seed removal words\n" + "\n".join(removal) + "\n")
    (OUT / "natural_stopwords.txt").write_text(
        "# function words, number words, calendar terms, places, names, institutions, single letters\n"
        + "\n".join(natural) + "\n")


if __name__ == "__main__":
    main()
