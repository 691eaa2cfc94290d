"""Regenerate the bundled autocorrection dictionary and phrase set.

The dictionary is a hand-curated list of common English words in rough
frequency order (function words first, then everyday verbs, nouns, and
adjectives with common inflections appended).  Every word used by the
bundled phrase set is guaranteed to be present.
"""

from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "typesim" / "data"

CORE = """
the of and to a in is it you that he was for on are as with his they at be
this have from or one had by word but not what all were we when your can
said there use an each which she do how their if will up other about out
many then them these so some her would make like him into time has look
two more write go see number no way could people my than first water been
call who oil its now find long down day did get come made may part over
new sound take only little work know place year live me back give most
very after thing our just name good sentence man think say great where
help through much before line right too mean old any same tell boy follow
came want show also around form three small set put end does another well
large must big even such because turn here why ask went men read need land
different home us move try kind hand picture again change off play spell
air away animal house point page letter mother answer found study still
learn should world high every near add food between own below country
plant last school father keep tree never start city earth eye light
thought head under story saw left few while along might close something
seem next hard open example begin life always those both paper together
got group often run important until children side feet car mile night walk
white sea began grow took river four carry state once book hear stop
without second later miss idea enough eat face watch far real almost let
above girl sometimes mountain cut young talk soon list song being leave
family body music color stand sun questions fish area mark dog horse birds
problem complete room knew since ever piece told usually friends easy
heard order red door sure become top ship across today during short better
best however low hours black products happened whole measure remember
early waves reached listen wind rock space covered fast several hold
himself toward five step morning passed vowel true hundred against
pattern numeral table north slowly money map farm pulled draw voice seen
cold cried plan notice south sing war ground fall king town unit figure
certain field travel wood fire upon done english road half ten fly gave
box finally wait correct oh quickly person became shown minutes strong
verb stars front feel fact inches street decided contain course surface
produce building ocean class note nothing rest carefully scientists inside
wheels stay green known island week less machine base ago stood plane
system behind ran round boat game force brought understand warm common
bring explain dry though language shape deep thousands yes clear equation
yet government filled heat full hot check object am rule among noun power
cannot able six size dark ball material special heavy fine pair circle
include built
""".split()

EXTRA = """
welcome hello thanks thank please sorry yesterday tomorrow morning evening
afternoon coffee tea lunch dinner breakfast meeting message phone email
computer keyboard screen typing type typed error errors mistake mistakes
correct corrected quick brown fox jumps lazy dogs cats happy sad angry
glad tired busy free late soon fast slow loud quiet bright dark clean
dirty warm cool rain snow sunny cloudy windy storm weather spring summer
autumn winter monday tuesday wednesday thursday friday saturday sunday
january february march april june july august september october november
december love hate like liked wants wanted need needed feel felt make
makes making take takes taking give gives giving come comes coming look
looks looking use used using work works working play plays playing talk
talks talking walk walks walking run runs running eat eats eating drink
drinks drinking sleep sleeps sleeping read reads reading write writes
writing buy buys buying sell sells selling pay pays paying meet meets
meeting visit visits visiting travel travels traveling drive drives
driving ride rides riding fly flies flying swim swims swimming sing sings
singing dance dances dancing cook cooks cooking wash washes washing open
opens opening close closes closing start starts starting finish finishes
finishing stop stops stopping help helps helping ask asks asking answer
answers answering call calls calling send sends sending receive receives
receiving bird cat dog fish horse cow sheep goat pig duck chicken mouse
rabbit lion tiger bear wolf deer apple banana orange grape lemon peach
pear plum berry bread butter cheese milk sugar salt pepper rice pasta
soup salad meat beef pork lamb egg eggs cake cookie candy juice water
wine beer glass plate bowl spoon fork knife cup bottle table chair desk
bed sofa lamp clock window floor wall roof kitchen bathroom bedroom
garden yard garage street road bridge park store shop market bank
hospital library museum station airport hotel restaurant office factory
farm field forest mountain valley river lake ocean beach island city
town village country world earth moon star sky cloud wind fire smoke
stone sand grass flower tree leaf branch root seed fruit head face eye
ear nose mouth tooth teeth lip hair neck shoulder arm elbow wrist hand
finger thumb chest back waist leg knee ankle foot toe skin bone blood
heart brain mind body health doctor nurse teacher student friend family
mother father parent brother sister son daughter baby child children
uncle aunt cousin neighbor guest person people man woman men women boy
girl king queen prince princess soldier police lawyer judge artist
writer singer actor player coach driver pilot sailor farmer worker boss
team group club class lesson test exam grade score point prize game
sport ball goal race match music song sound voice word sentence story
book page paper pen pencil letter note card sign picture photo map
money price cost bill coin dollar cent gift box bag case key lock door
gate train bus car truck bike boat ship plane wheel engine oil gas
light fire ice heat cold hot new old young big small long short tall
wide narrow thick thin heavy light hard soft smooth rough sharp dull
clean dirty wet dry full empty open closed right wrong true false good
bad better best worse worst early late first last next near far high
low deep shallow strong weak rich poor safe dangerous easy difficult
simple complex nice kind mean brave shy proud humble honest fair calm
nervous serious funny strange normal special common rare whole half
quarter single double triple zero one two three four five six seven
eight nine ten eleven twelve twenty thirty forty fifty sixty seventy
eighty ninety hundred thousand million today tonight tomorrow yesterday
now then soon later always never often sometimes usually rarely again
once twice here there everywhere nowhere somewhere anywhere inside
outside above below under over between among around through across
along behind beside beyond within without toward away back forward
north south east west left right middle center top bottom side edge
corner front end beginning middle finish animals blows builds castle
coat colors draws falls fell flowers fresh games getting houses keys
lands lives lost math movie needs nights noon paints piano pond quite
ready sails shelf smells smile stopped teaches wears won wonderful
""".split()


def main():
    seen = set()
    words = []
    for w in CORE + EXTRA:
        w = w.strip().lower()
        if w and w.isalpha() and w not in seen:
            seen.add(w)
            words.append(w)
    out = DATA / "words_en.txt"
    out.write_text("\n".join(words) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(words)} words)")


if __name__ == "__main__":
    main()
