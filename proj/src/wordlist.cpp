#include "parascope/wordlist.hpp"

namespace parascope {

namespace {

const char* kWords[] = {
    // function words first; bias assignment downstream is rank-based
    "the", "of", "and", "to", "a", "in", "is", "that", "it", "for",
    "as", "with", "was", "on", "are", "by", "this", "be", "from", "at",
    "or", "an", "which", "have", "has", "can", "but", "not", "also", "its",
    "they", "their", "more", "one", "all", "other", "when", "such", "into", "most",
    "some", "these", "than", "many", "over", "will", "each", "may", "both", "about",
    "often", "where", "between", "through", "while", "new", "first", "after", "them", "used",
    "use", "how", "during", "including", "within", "made", "make", "across", "under", "well",
    "then", "before", "because", "only", "even", "still", "very", "much", "around", "among",
    "two", "three", "four", "five", "several", "early", "late", "long", "short", "small",
    "large", "high", "low", "great", "important", "different", "similar", "common", "rare", "simple",
    "complex", "general", "specific", "local", "global", "natural", "human", "public", "private", "modern",
    "ancient", "old", "young", "good", "better", "best", "same", "own", "however", "therefore",
    "example", "part", "form", "kind", "type", "way", "point", "case", "result", "results",
    "change", "changes", "process", "system", "systems", "structure", "function", "method", "methods", "study",
    "studies", "research", "theory", "data", "model", "models", "test", "tests", "measure", "value",
    "values", "number", "numbers", "level", "levels", "rate", "range", "scale", "size", "amount",
    "area", "areas", "region", "regions", "field", "state", "states", "group", "groups", "period",
    "time", "times", "year", "years", "century", "day", "days", "season", "history", "world",
    // topical nouns
    "water", "river", "rivers", "ocean", "sea", "lake", "rain", "storm", "storms", "weather",
    "climate", "wind", "winds", "cloud", "clouds", "snow", "ice", "mountain", "mountains", "valley",
    "forest", "forests", "tree", "trees", "plant", "plants", "flower", "flowers", "garden", "soil",
    "seed", "seeds", "leaf", "leaves", "root", "roots", "animal", "animals", "bird", "birds",
    "fish", "insect", "insects", "horse", "horses", "whale", "whales", "species", "wildlife", "habitat",
    "coast", "island", "islands", "desert", "beach", "wave", "waves", "tide", "reef", "volcano",
    "volcanoes", "earthquake", "lava", "rock", "rocks", "stone", "mineral", "minerals", "fossil", "fossils",
    "earth", "planet", "planets", "moon", "star", "stars", "sun", "sky", "space", "orbit",
    "rocket", "telescope", "light", "shadow", "color", "colors", "sound", "sounds", "music", "song",
    "songs", "instrument", "instruments", "piano", "guitar", "art", "painting", "paintings", "image", "images",
    "picture", "book", "books", "story", "stories", "writer", "writers", "author", "page", "pages",
    "word", "words", "language", "languages", "letter", "letters", "sentence", "paragraph", "text", "reader",
    "readers", "school", "schools", "teacher", "teachers", "student", "students", "lesson", "lessons", "class",
    "learning", "knowledge", "idea", "ideas", "thought", "mind", "memory", "question", "questions", "answer",
    "answers", "problem", "problems", "solution", "solutions", "reason", "reasons", "logic", "city", "cities",
    "town", "towns", "village", "villages", "street", "streets", "road", "roads", "bridge", "bridges",
    "building", "buildings", "house", "houses", "home", "homes", "room", "rooms", "door", "window",
    "windows", "wall", "walls", "roof", "floor", "kitchen", "brick", "wood", "metal", "iron",
    "steel", "gold", "silver", "glass", "paper", "machine", "machines", "engine", "engines", "energy",
    "power", "fuel", "oil", "coal", "solar", "electric", "electricity", "computer", "computers", "software",
    "program", "programs", "code", "network", "networks", "internet", "signal", "signals", "device", "devices",
    "phone", "screen", "robot", "robots", "science", "scientists", "scientist", "experiment", "experiments", "laboratory",
    "cell", "cells", "gene", "genes", "protein", "proteins", "brain", "nerve", "nerves", "blood",
    "heart", "bone", "bones", "muscle", "muscles", "body", "health", "disease", "diseases", "medicine",
    "doctor", "doctors", "patient", "patients", "hospital", "treatment", "treatments", "symptom", "symptoms", "pain",
    "sleep", "food", "foods", "bread", "fruit", "fruits", "vegetable", "vegetables", "meat", "milk",
    "sugar", "salt", "cooking", "recipe", "recipes", "flavor", "meal", "meals", "trade", "market",
    "markets", "money", "price", "prices", "cost", "costs", "bank", "banks", "economy", "economic",
    "industry", "industries", "factory", "factories", "business", "businesses", "company", "companies", "worker", "workers",
    "work", "works", "job", "jobs", "travel", "journey", "ship", "ships", "boat", "boats",
    "train", "trains", "car", "cars", "wheel", "wheels", "flight", "flights", "airport", "country",
    "countries", "nation", "nations", "government", "law", "laws", "rule", "rules", "right", "rights",
    "court", "courts", "judge", "judges", "policy", "policies", "leader", "leaders", "people", "person",
    "family", "families", "child", "children", "parent", "parents", "friend", "friends", "team", "teams",
    "community", "communities", "society", "culture", "cultures", "tradition", "traditions", "festival", "festivals", "game",
    "games", "sport", "sports", "ball", "player", "players", "race", "races", "score", "chess",
    "puzzle", "puzzles", "empire", "empires", "king", "kings", "queen", "war", "wars", "peace",
    "army", "castle", "temple", "temples", "museum", "map", "maps", "farm", "farms", "farmer",
    "farmers", "crop", "crops", "harvest", "grain", "cotton", "wool", "tool", "tools", "craft",
    "pot", "pottery", "cloth", "thread", "needle", "clock", "clocks", "calendar", "ecosystem", "bacteria",
    "virus", "evolution", "dinosaur", "dinosaurs", "migration", "territory", "predator", "predators", "prey", "nest",
    "nests", "egg", "eggs", "wing", "wings", "feather", "feathers", "fur", "shell", "tail",
    // verbs and connectors
    "grow", "grows", "growing", "build", "built", "find", "found", "show", "shows", "shown",
    "help", "helps", "move", "moves", "moving", "turn", "turns", "begin", "begins", "began",
    "end", "ends", "keep", "keeps", "hold", "holds", "bring", "brings", "carry", "carries",
    "send", "produce", "produces", "create", "creates", "created", "develop", "develops", "developed", "improve",
    "improves", "increase", "increases", "decrease", "decreases", "reduce", "reduces", "rise", "rises", "fall",
    "falls", "lead", "leads", "follow", "follows", "allow", "allows", "require", "requires", "provide",
    "provides", "include", "includes", "contain", "contains", "remain", "remains", "become", "becomes", "became",
    "appear", "appears", "happen", "happens", "occur", "occurs", "depend", "depends", "affect", "affects",
    "cause", "causes", "prevent", "prevents", "protect", "protects", "support", "supports", "cover", "covers",
    "reach", "reaches", "pass", "passes", "spread", "spreads", "collect", "collects", "gather", "store",
    "stores", "save", "saves", "share", "shares", "learn", "learns", "learned", "teach", "teaches",
    "read", "reads", "write", "writes", "written", "live", "lives", "lived", "eat", "eats",
    "drink", "feel", "feels", "hear", "hears", "speak", "speaks", "tell", "tells", "told",
    "ask", "asks", "call", "calls", "called", "play", "plays", "played", "run", "runs",
    "walk", "walks", "see", "seen", "saw", "look", "looks", "think", "thinks", "know",
    "known", "say", "says", "said", "take", "takes", "taken", "give", "gives", "given",
    "get", "gets", "go", "goes", "went", "come", "comes", "came", "explain", "explains",
    "describe", "describes", "discuss", "compare", "compares", "record", "records", "report", "reports", "note",
    "notes", "notice", "design", "designs", "plan", "plans", "prepare", "choose", "chosen", "decide",
    "buy", "sell", "pay", "spend", "win", "wins", "lose", "lost", "open", "opens",
    "close", "closes", "break", "breaks", "cut", "cuts", "fill", "fills", "join", "shaped",
};

}  // namespace

const std::vector<std::string>& builtin_wordlist() {
    static const std::vector<std::string> words = [] {
        std::vector<std::string> out;
        out.reserve(sizeof(kWords) / sizeof(kWords[0]));
        for (const char* w : kWords) {
            out.emplace_back(w);
        }
        return out;
    }();
    return words;
}

}  // namespace parascope
