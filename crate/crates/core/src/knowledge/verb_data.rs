//! Bundled English verb inventory.

/// Irregular verbs as `base past participle`, optionally followed by
/// `third_singular gerund` when those are not rule-derived.
pub(super) const IRREGULAR: &str = "
arise arose arisen
awake awoke awoken
bear bore born
beat beat beaten
become became become
begin began begun begins beginning
bend bent bent
bet bet bet bets betting
bite bit bitten
bleed bled bled
blow blew blown
break broke broken
breed bred bred
bring brought brought
build built built
burst burst burst
buy bought bought
cast cast cast
catch caught caught
choose chose chosen
come came come
cost cost cost
creep crept crept
cut cut cut cuts cutting
deal dealt dealt
dig dug dug digs digging
dive dove dived
do did done does doing
draw drew drawn
drink drank drunk
drive drove driven
eat ate eaten
fall fell fallen
feed fed fed
feel felt felt
fight fought fought
find found found
flee fled fled
fly flew flown
forbid forbade forbidden forbids forbidding
forget forgot forgotten forgets forgetting
forgive forgave forgiven
freeze froze frozen
get got gotten gets getting
give gave given
go went gone goes going
grow grew grown
hang hung hung
have had had has having
hear heard heard
hide hid hidden
hit hit hit hits hitting
hold held held
hurt hurt hurt
keep kept kept
kneel knelt knelt
know knew known
lay laid laid
lead led led
leave left left
lend lent lent
let let let lets letting
light lit lit
lose lost lost
make made made
mean meant meant
meet met met
mislead misled misled
overcome overcame overcome
overtake overtook overtaken
pay paid paid
prove proved proven
put put put puts putting
quit quit quit quits quitting
read read read
rebuild rebuilt rebuilt
rid rid rid rids ridding
ride rode ridden
ring rang rung
rise rose risen
run ran run runs running
say said said
see saw seen
seek sought sought
sell sold sold
send sent sent
set set set sets setting
sew sewed sewn
shake shook shaken
shed shed shed sheds shedding
shine shone shone
shoot shot shot
show showed shown
shrink shrank shrunk
shut shut shut shuts shutting
sing sang sung
sink sank sunk
sit sat sat sits sitting
sleep slept slept
slide slid slid
speak spoke spoken
speed sped sped
spend spent spent
spin spun spun spins spinning
spit spat spat spits spitting
split split split splits splitting
spread spread spread
spring sprang sprung
stand stood stood
steal stole stolen
stick stuck stuck
sting stung stung
stink stank stunk
strike struck struck
strive strove striven
swear swore sworn
sweep swept swept
swell swelled swollen
swim swam swum swims swimming
swing swung swung
take took taken
teach taught taught
tear tore torn
tell told told
think thought thought
throw threw thrown
understand understood understood
undertake undertook undertaken
undo undid undone undoes undoing
upset upset upset upsets upsetting
wake woke woken
wear wore worn
weave wove woven
weep wept wept
win won won wins winning
withdraw withdrew withdrawn
write wrote written
";

/// Multi-syllable regular verbs whose final consonant doubles.
pub(super) const DOUBLING: &[&str] = &[
    "admit", "commit", "compel", "control", "equip", "occur", "omit", "patrol", "permit",
    "prefer", "propel", "refer", "regret", "submit", "transfer", "rebel", "expel", "excel",
];

/// Regular verbs, inflected by rule.
pub(super) const REGULAR: &str = "
accept accuse achieve act add admire admit adopt advise afford agree aim allow amaze announce
annoy answer apologize appear applaud apply appreciate approach approve argue arrange arrest
arrive ask attach attack attempt attend attract avoid bake balance ban bang bathe battle beg
behave believe belong blame bless blink boast boil bolt book borrow bounce bow box brake
breathe brush bump burp bury buzz calculate call camp care carry carve cause celebrate challenge
change charge chase cheat check cheer chew chop claim clap clean clear climb close coach
collect comb command commit compare compete complain complete concentrate concern confess
confirm confuse connect consider consist contain continue control cook copy correct cough
count cover crack crash crawl cross crush cry cure curl cycle dam damage dance dare decay
deceive decide decorate delay delight deliver deny depend describe deserve destroy detect
develop disagree disappear disapprove disarm discover dislike divide double doubt drag drain
dread dress drip drop drown dry dust earn educate embarrass employ empty encourage end enjoy
enter entertain escape examine excite excuse exercise exist expand expect explain explode
extend face fade fail fancy fasten fax fear fence fetch file fill film fire fit fix flap
flash float flood flow flower fold follow fool force form frame frighten fry gather gaze
glow glue grab grate grease greet grin grip groan guarantee guard guess guide hammer hand
handle happen harass harm hate haunt head heal heap heat help hook hop hope hover hug hum
hunt hurry identify ignore imagine impress improve include increase influence inform inject
injure instruct intend interest interfere interrupt introduce invent invite irritate itch
jail jam jog join joke judge juggle jump kick kill kiss knit knock knot label land last
laugh launch learn level license lick lighten like list listen live load lock long look love
manage march mark marry match mate matter measure melt memorize mend milk miss mix moan
moor mourn move muddle mug multiply murder nail name need nest nod note notice number obey
object observe obtain offend offer open order overflow owe own pack paddle paint park part
pass pause peck pedal peel peep perform permit phone pick pinch place plan plant play
plead please plug point poke polish pop possess post pour practice praise pray preach precede
prefer prepare present preserve press pretend prevent prick print produce program promise
protect provide pull pump punch puncture punish push question queue race radiate rain raise
reach realize receive recognize record reduce reflect refuse regret reign reject rejoice relax
release rely remain remember remind remove repair repeat replace reply report reproduce request
rescue retire return rhyme rinse risk rob rock roll rot rub ruin rule rush sack sail satisfy
save scare scatter scold scorch scrape scratch scream screw scribble scrub seal search
separate serve settle shade share shave shelter shiver shock shop shrug sigh sign signal sin
sip ski skip slap slip slow smash smell smile smoke snatch sneeze sniff snore snow soak
soothe sound spare spark sparkle spell spill spoil spot spray sprout squash squeak squeal
squeeze stain stamp stare start stay steer step stir stitch stop store strap strengthen stretch
strip stroke stuff subtract succeed suck suffer suggest suit supply support suppose surprise
surround suspect suspend switch talk tame tap taste tease telephone tempt terrify test thank
thaw tick tickle tie time tip tire touch tour tow trace trade train transport trap travel
treat tremble trick trip trot trouble trust try tug tumble turn twist type undress unfasten
unite unlock unpack use vanish visit wail wait walk wander want warm warn wash waste
watch water wave weigh welcome whine whip whirl whisper whistle wink wipe wish wobble wonder
work worry wrap wreck wrestle wriggle yawn yell zip zoom
";
