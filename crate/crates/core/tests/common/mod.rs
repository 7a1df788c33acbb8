//! Reference data computed independently with exact integer long division
//! and 40-digit root finding, outside this crate.

#![allow(dead_code)]

use rug::Integer;

pub const SERIES: [(usize, &[&str]); 10] = [
    (4, &["1", "4", "8", "12", "16", "20", "24", "28", "32", "36", "40", "44", "48", "52", "56", "60", "64", "68", "72", "76", "80", "84", "88", "92", "96", "100", "104", "108", "112", "116"]),
    (5, &["1", "4", "12", "25", "44", "68", "97", "132", "172", "217", "268", "324", "385", "452", "524", "601", "684", "772", "865", "964", "1068", "1177", "1292", "1412", "1537", "1668", "1804", "1945", "2092", "2244"]),
    (6, &["1", "9", "45", "189", "765", "3069", "12285", "49149", "196605", "786429", "3145725", "12582909", "50331645", "201326589", "805306365", "3221225469", "12884901885", "51539607549", "206158430205", "824633720829", "3298534883325", "13194139533309", "52776558133245", "211106232532989", "844424930131965", "3377699720527869", "13510798882111485", "54043195528445949", "216172782113783805", "864691128455135229"]),
    (7, &["1", "9", "69", "481", "3309", "22689", "155521", "1065969", "7306269", "50077921", "343239189", "2352596409", "16124935681", "110521953369", "757528737909", "5192179212001", "35587725746109", "243921901010769", "1671865581329281", "11459137168294209", "78542094596730189", "538335525008817121", "3689806580464989669", "25290310538246110569", "173342367187257784321", "1188106259772558379689", "8143401451220650873509", "55815703898771997734881", "382566525840183333270669", "2622149976982511335159809"]),
    (8, &["1", "15", "163", "1693", "17501", "180827", "1868287", "19302873", "199434425", "2060526855", "21289057307", "219955376821", "2272546270741", "23479610397715", "242587845856503", "2506381577908273", "25895562046393201", "267549099310823807", "2764277539672217747", "28560104803265021773", "295078759157520539085", "3048709894649542995275", "31498817631845594196207", "325441103446912255730441", "3362409124387765196656681", "34739911461768876967306615", "358927603312190202519506443", "3708386665326097854140081253", "38314500006863513854871655301", "395859721021528157627127145987"]),
    (9, &["1", "16", "216", "2785", "35758", "458879", "5888665", "75567425", "969733288", "12444285964", "159693654829", "2049299048906", "26298017891439", "337474291703381", "4330702718008649", "55574562249180036", "713171087995658944", "9151902960070839589", "117443526806380048558", "1507116284875265498515", "19340354959544948068305", "248188765336148279858829", "3184929302896878487004728", "40871208052920566606842200", "524487512544075117002200221", "6730585268203596214288655726", "86371509271638647084588027391", "1108378739231373936634398917009", "14223479940780971852114062540833", "182525498248092104082927374060280"]),
    (10, &["1", "25", "465", "8361", "150049", "2692537", "48315633", "866988873", "15557484097", "279167724889", "5009461563921", "89891140425705", "1613031066098785", "28944668049352441", "519390993822245169", "9320093220751060617", "167242286979696845953", "3001041072413792166553", "53851497016468562152017", "966325905224020326569769", "17340014797015897316103841", "311153940441062131363299385", "5583430913142102467223285105", "100190602496116782278655832521", "1797847414016959978548581700289", "32261062849809162831595814772697", "578901283882547970990176084208273", "10387962047036054314991573700976233", "186404415562766429698858150533363937", "3344891518082759680264455135899574649"]),
    (11, &["1", "25", "585", "13441", "308585", "7084025", "162624001", "3733268025", "85702540585", "1967425165441", "45165076264585", "1036829328920025", "23801909488896001", "546407088915688025", "12543561135571928585", "287955499029238669441", "6610432916536917468585", "151752001581319863108025", "3483685603453819934016001", "79973016877856538619260025", "1835895702587246568308964585", "42145628142628814532486925441", "967513551577875487678890320585", "22210666058148507402081990448025", "509877805785837794760206889984001", "11704978867016120772082676479184025", "268704636135584939963141352131248585", "6168501652251437498380168422539533441", "141606833365647477522780732366278020585", "3250788665757640545525576676001854940025"]),
    (12, &["1", "34", "898", "23202", "598926", "15459826", "399057418", "10300686018", "265886880966", "6863216036290", "177157045844050", "4572873522593058", "118037485633173630", "3046847446307899666", "78646874857388245978", "2030075687684636314434", "52401412073922915961398", "1352613601551411499424098", "34914394148785661816477218", "901229233077784418806390434", "23263016596901786494956564846", "600477571438275989337177442354", "15499851977427196390529394947242", "400090565825319862953295771946178", "10327354164126337695536609196163494", "266575253558623046795451043920608002", "6880984682087333673682122962722863346", "177615699743517831778018167114743933730", "4584712545212301721543503759648962919006", "118343080890821879699619177436629442637650"]),
    (13, &["1", "36", "1236", "42001", "1426836", "48470436", "1646568001", "55934841636", "1900138047636", "64548758778001", "2192757660404436", "74489211694972836", "2530440439968672001", "85960485747239875236", "2920126074966187086036", "99198326063103121050001", "3369822960070539928614036", "114474782316335254451827236", "3888772775795328111433512001", "132103799594724820534287580836", "4487640413444848570054344236436", "152447670257530126561313416458001", "5178733148342579454514601815335636", "175924479373390171326935148304953636", "5976253565546923245661280440553088001", "203016696749222000181156599830500038436", "6896591435908001082913663113796448218836", "234281092124122814818883389269248739402001", "7958660540784267702759121572040660691449236", "270360177294540979078991250060113214769872036"]),
];
pub const LAMBDA_GF: [(usize, &str); 10] = [
    (4, "1.0"),
    (5, "1.0"),
    (6, "4.0"),
    (7, "6.8541019662496845446"),
    (8, "10.331851412666623662"),
    (9, "12.832689258045955734"),
    (10, "17.944271909999158786"),
    (11, "22.956439237389600016"),
    (12, "25.812541075100670852"),
    (13, "33.970562748477140586"),
];
pub const LAMBDA_COMMON: [(usize, &str); 13] = [
    (5, "6.8541019662496845446"),
    (6, "13.928203230275509174"),
    (7, "22.956439237389600016"),
    (8, "33.970562748477140586"),
    (9, "46.978713763747791812"),
    (10, "61.983866769659335081"),
    (11, "78.987339743264549272"),
    (12, "97.989794855663561964"),
    (13, "118.99159604515582334"),
    (14, "141.99295739719539251"),
    (15, "166.99401176132333863"),
    (16, "193.99484522385712844"),
    (17, "222.99551560488879142"),
];

/// First 30 series coefficients of the reference fraction for `q`.
pub fn series(q: usize) -> Vec<Integer> {
    let row = SERIES.iter().find(|r| r.0 == q).expect("q in 4..=13");
    row.1.iter().map(|s| s.parse().unwrap()).collect()
}

pub fn lambda_gf(q: usize) -> f64 {
    LAMBDA_GF.iter().find(|r| r.0 == q).expect("q in 4..=13").1.parse().unwrap()
}

pub fn lambda_common(q: usize) -> f64 {
    LAMBDA_COMMON.iter().find(|r| r.0 == q).expect("q in 5..=17").1.parse().unwrap()
}

