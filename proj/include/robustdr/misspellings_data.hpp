// Copyright 2026 The RobustDR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string_view>

namespace robustdr {

// Common English misspellings, correct <TAB> comma-separated variants.
// Mirrors data/misspellings.tsv.
inline constexpr std::string_view kDefaultMisspellings =
    "absence\tabsance,absense,absnce\n"
    "acceptable\tacceptible\n"
    "accidentally\taccidentaly,accidently\n"
    "accommodate\taccomodate,acommodate\n"
    "achieve\tacheive\n"
    "acknowledge\tacknowlege,aknowledge\n"
    "acquaintance\tacquaintence,aquaintance\n"
    "acquire\taquire,adquire\n"
    "across\taccross\n"
    "address\tadress\n"
    "aggressive\taggresive,agressive\n"
    "amateur\tamatuer,amature\n"
    "apparent\tapparant,aparent\n"
    "argument\targuement\n"
    "athlete\tathelete\n"
    "awful\tawfull\n"
    "basically\tbasicly\n"
    "beginning\tbegining\n"
    "believe\tbeleive,belive\n"
    "bizarre\tbizzare\n"
    "business\tbuisness,busness\n"
    "calendar\tcalender\n"
    "caribbean\tcarribean\n"
    "cemetery\tcemetary,cematery\n"
    "changeable\tchangable\n"
    "colleague\tcollegue\n"
    "coming\tcomming\n"
    "committed\tcommited,comitted\n"
    "committee\tcomittee,commitee\n"
    "completely\tcompletly\n"
    "conscious\tconcious\n"
    "curiosity\tcuriousity\n"
    "definitely\tdefinately,definatly,defintely\n"
    "dilemma\tdilemna\n"
    "disappear\tdissapear\n"
    "disappoint\tdissapoint\n"
    "ecstasy\tecstacy\n"
    "embarrass\tembarass\n"
    "environment\tenviroment\n"
    "existence\texistance\n"
    "familiar\tfamilar\n"
    "finally\tfinaly\n"
    "fluorescent\tflourescent\n"
    "foreign\tforeigne\n"
    "forty\tfourty\n"
    "forward\tfoward\n"
    "friend\tfreind\n"
    "further\tfurthur\n"
    "glamorous\tglamourous\n"
    "government\tgoverment\n"
    "grammar\tgrammer\n"
    "guarantee\tgaurantee,guarentee\n"
    "harass\tharrass\n"
    "height\theighth\n"
    "hierarchy\thierarchey\n"
    "humorous\thumerous\n"
    "hygiene\thygene,hygine\n"
    "ignorance\tignorence\n"
    "immediately\timmediatly,imediately\n"
    "incidentally\tincidently\n"
    "independent\tindependant\n"
    "interrupt\tinterupt\n"
    "irresistible\tirresistable\n"
    "knowledge\tknowlege\n"
    "liaison\tliason\n"
    "library\tlibary\n"
    "license\tlisense\n"
    "lightning\tlightening\n"
    "maintenance\tmaintainance,maintnance\n"
    "millennium\tmillenium\n"
    "miniature\tminiture\n"
    "mischievous\tmischievious\n"
    "misspell\tmispell\n"
    "necessary\tneccessary,necessery\n"
    "neighbour\tnieghbour\n"
    "noticeable\tnoticable\n"
    "occasion\toccassion,ocassion\n"
    "occurred\toccured\n"
    "occurrence\toccurence,occurrance\n"
    "parliament\tparliment\n"
    "pastime\tpasttime\n"
    "perseverance\tperseverence\n"
    "persistent\tpersistant\n"
    "possession\tposession\n"
    "potato\tpotatoe\n"
    "preferred\tprefered\n"
    "presence\tpresance\n"
    "president\tpresidant,presedent\n"
    "privilege\tprivelege,priviledge\n"
    "pronunciation\tpronounciation\n"
    "publicly\tpublically\n"
    "questionnaire\tquestionaire\n"
    "receipt\treciept\n"
    "receive\trecieve\n"
    "recommend\treccommend,recomend\n"
    "referred\trefered\n"
    "relevant\trelevent\n"
    "religious\treligous\n"
    "remember\trember\n"
    "restaurant\trestraunt\n"
    "rhythm\trythm\n"
    "schedule\tschedual\n"
    "secretary\tsecratary\n"
    "seize\tsieze\n"
    "separate\tseperate\n"
    "sergeant\tsargent\n"
    "siege\tseige\n"
    "similar\tsimiliar\n"
    "sincerely\tsincerly\n"
    "speech\tspeach\n"
    "successful\tsuccesful,sucessful\n"
    "supersede\tsupercede\n"
    "surprise\tsuprise\n"
    "tendency\ttendancy\n"
    "therefore\ttherefor\n"
    "threshold\tthreshhold\n"
    "tomorrow\ttommorow,tommorrow\n"
    "tongue\ttounge\n"
    "truly\ttruely\n"
    "twelfth\ttwelth\n"
    "tyranny\ttyrany\n"
    "until\tuntill\n"
    "vacuum\tvaccuum,vacume\n"
    "weird\twierd\n"
    "which\twich\n"
    "wherever\twhereever\n"
    "written\twriten,writtin\n";

}  // namespace robustdr
