"""
Data used in calculations.
"""

POLARITIES = ("positive","negative","neutral")

# Gold label sources used when rendering prompts for base training
OBJECTIVES = ("absc","aspect-blind")

PAD_WORD = "<pad>"
UNK_WORD = "<unk>"

# Aspect lexicons. Within a domain no aspect is a token subsequence of
# another, so the first occurrence of an aspect in a sentence is always the
# intended one. price and design are shared; everything else is unique to
# one or two domains.
DOMAIN_ASPECTS = {
    "device":["battery life","screen","camera","speaker","charger",
              "volume button","price","design"],
    "laptop":["keyboard","trackpad","display","fan","battery life",
              "hinge","price","design"],
    "restaurant":["pasta","waiter","dessert","wine list","ambience",
                  "portion size","price","menu"],
    "service":["agent","wait time","refund","support line","manager",
               "booking","price","staff"],
}

OPINIONS = {
    "positive":["great","excellent","superb","lovely","fantastic",
                "wonderful","impressive","reliable"],
    "negative":["terrible","awful","poor","disappointing","horrible",
                "dreadful","weak","flimsy"],
    "neutral":["average","ordinary","standard","typical","unremarkable",
               "acceptable","adequate","plain"],
}

# {a} aspect, {o} opinion word
SINGLE_TEMPLATES = [
    "the {a} was {o}",
    "i thought the {a} was {o}",
    "overall the {a} is {o}",
    "honestly , the {a} seemed {o} to me",
]

# {a1}/{o1} is mentioned first, {a2}/{o2} second
CONTRASTIVE_TEMPLATES = [
    "the {a1} was {o1} but the {a2} was {o2}",
    "the {a1} is {o1} , however the {a2} is {o2}",
    "although the {a1} was {o1} , the {a2} was {o2}",
    "i found the {a1} {o1} while the {a2} felt {o2}",
]

# Prompt templates. {S} sentence, {A} aspect. The label word follows the
# final token.
PROMPT_TEMPLATES = {
    "default":"review : {S} . aspect : {A} . sentiment :",
    "question":"{S} . what do you think of the {A} ? sentiment :",
}

# Position role buckets used to aggregate indirect effects
ROLE_BUCKETS = ("first","pre-aspect","aspect-first","aspect-middle",
                "aspect-last","post-aspect","last")
ASPECT_BUCKETS = ("aspect-first","aspect-middle","aspect-last")
