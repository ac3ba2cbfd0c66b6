"""Embedded name lexicon, header label sets and OCR confusable tables."""

import re

# Single-character surnames. Characters that commonly open short words in
# template prose are left out so prose never reads as a name.
SURNAMES = tuple(dict.fromkeys(
    "王李张刘陈杨黄赵吴周徐孙马朱胡郭何高林罗郑梁谢宋唐许韩冯邓曹彭曾肖田董袁潘于蒋蔡余杜叶程苏魏吕丁任"
    "沈姚卢姜崔钟谭陆汪范金石廖贾夏韦付白邹孟熊秦邱江尹薛闫段雷侯龙史陶黎贺顾毛郝龚邵万钱严覃武戴莫孔"
    "汤温康施牛樊葛邢齐易乔伍庞颜倪庄聂章鲁岳翟殷詹申欧耿兰焦俞左柳甘祝包符舒阮柯纪梅童凌毕季裴霍涂"
    "苗谷盛曲翁冉骆蓝游辛靳柴蒙鲍喻祁蒲房滕屈饶艾尤阳穆卓吉缪芦麦褚娄窦戚岑景费卜冷晏席卫米柏宗瞿桂"
    "佟臧闵苟邬卞姬仇栾隋刁沙荣巫寇桑郎甄丛仲虞敖巩佘池麻苑迟邝"
))

GIVEN_NAME_CHARS = tuple(dict.fromkeys(
    "伟芳娜敏静丽强磊军洋勇艳杰娟涛明超秀霞平刚桂英华玉兰萍红建文辉力永健世广志义兴良海山仁波宁贵福生龙"
    "元全国胜学祥才发武新利清飞彬富顺信子杰涛昌成康星光天达安岩中茂进林有坚和彪博诚先敬震振壮会思群豪心"
    "邦承乐绍功松善厚庆磊民友裕河哲江超浩亮政谦亨奇固之轮翰朗伯宏言若鸣朋斌梁栋维启克伦翔旭鹏泽晨辰士以"
    "建家致树炎德行时泰盛雄琛钧冠策腾楠榕风航弘秀娟英华慧巧美娜静淑惠珠翠雅芝玉萍红娥玲芬芳燕彩春菊兰凤"
    "洁梅琳素云莲真环雪荣爱妹霞香月莺媛艳瑞凡佳嘉琼勤珍贞莉桂娣叶璧璐娅琦晶妍茜秋珊莎锦黛青倩婷姣婉娴瑾"
    "颖露瑶怡婵雁蓓纨仪荷丹蓉眉君琴蕊薇菁梦岚苑婕馨瑗琰韵融园艺咏卿聪澜纯毓悦昭冰爽琬茗羽希宁欣飘育滢馥"
    "筠柔竹霭凝晓欢霄枫芸菲寒伊亚宜可姬舒影荔枝思丽秀飘育馥琦晶妍茜秋珊莎锦黛青倩婷宁蓓纨苑婕馨瑗琰韵"
    "融园艺咏卿聪澜纯爽琬茗羽希欣滢筠柔竹凝晓欢霄伊亚宜可舒影荔枝思丽峰军平保东文辉力明永健世广志义兴"
    "良海山仁波宁贵福生龙元全国胜学祥才发成康星光天达安岩中茂进林有坚和彪博诚先敬震振壮会群豪心邦承乐"
    "绍功松善厚庆磊民友裕河哲江超浩亮政谦亨奇固之轮翰朗伯宏言若鸣朋斌梁栋维启克伦翔旭鹏泽晨辰士以建家"
    "致树炎德行时泰盛雄琛钧冠策腾楠榕风航弘毅俊峻恺睿谨铭骏骁逸昊晟昕曜煜烨灿炜焕熙璋瑜瑞琨琪璇瑛琳琅"
    "珏璟瑄瑭璞珩玮珂玺琮璨琛湘沅澄涵淼渊源沛潇洵泓浚澈溪沐泉清湛润漪鑫铮钰锐镇锋铎钢锦钊鉴钦铠锡铄"
    "甜蜜薰蔓蕾芊芷萱苒蔚莹蓁菀葳芮芃莘茹荃菡蕙蓝葵苓芙芹茉莺鹂鸾鹤鹰燕雀鹃翎翠羚麒麟骐骥驰骋"
    "大天千土白由甲末自力太夭干士已己"
))

NAME_LABELS = ("姓名", "名字", "人员姓名", "持有人")
ID_LABELS = ("身份证号", "身份证号码", "公民身份号码", "证件号码")
HEADER_LABELS = frozenset(NAME_LABELS + ID_LABELS)

# OCR glyph confusions. Each entry lists the glyphs a character may be misread as.
DIGIT_CONFUSABLES = {
    "0": "8",
    "8": "03",
    "1": "7",
    "7": "1",
    "5": "6",
    "6": "5",
    "3": "8",
}

# Characters used in header labels have no entry so headers survive noise.
CJK_CONFUSABLES = {
    "王": "玉", "玉": "王",
    "土": "士", "士": "土",
    "未": "末", "末": "未",
    "己": "已", "已": "己",
    "大": "太", "太": "大",
    "天": "夭", "夭": "天",
    "刀": "力", "力": "刀",
    "千": "干", "干": "千",
    "白": "自", "自": "白",
    "田": "由", "由": "田",
    "申": "甲", "甲": "申",
    "杨": "扬", "扬": "杨",
}

CONFUSABLES = {**DIGIT_CONFUSABLES, **CJK_CONFUSABLES}

CJK_CLASS = "㐀-䶿一-鿿豈-﫿"
CJK_RUN = re.compile(f"[{CJK_CLASS}]+")

_SURNAME_SET = frozenset(SURNAMES)


def is_name_token(run: str) -> bool:
    """A CJK run of two or three characters opening with a known surname."""
    return (
        2 <= len(run) <= 3
        and run[0] in _SURNAME_SET
        and run not in HEADER_LABELS
        and CJK_RUN.fullmatch(run) is not None
    )


def name_tokens(text: str) -> list[tuple[int, int, str]]:
    """Return (start, end, token) for every name token in text, in order."""
    return [
        (match.start(), match.end(), match.group())
        for match in CJK_RUN.finditer(text)
        if is_name_token(match.group())
    ]
